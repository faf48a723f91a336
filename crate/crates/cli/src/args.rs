use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use exemplar_core::baselines::{Baseline, DEFAULT_LSI_DIM, DEFAULT_NEIGHBORS};
use exemplar_core::corpus::{CorpusMode, SplitSpec};
use exemplar_core::model::ExemplarMode;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::stages::{self, BaselineSettings, EvaluatePaths, GeneratePaths, TrainPaths};

#[derive(Debug, Parser)]
#[command(name = "exemplar", version, about = "Retrieve-and-refine code comment generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Settings accepted by every subcommand. A `--config` file is applied
/// first, then `--set`, then the dedicated flags.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// key=value settings file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override any setting, e.g. `--set dropout=0.1` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub sets: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub mode: Option<CorpusMode>,
    #[arg(long, global = true, value_parser = parse_exemplar)]
    pub exemplar: Option<ExemplarMode>,
    #[arg(long, global = true)]
    pub beam: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true)]
    pub clip: Option<f64>,
    /// EMBED,HIDDEN[,ATTENTION]
    #[arg(long, global = true)]
    pub dims: Option<String>,
    #[arg(long, global = true)]
    pub max_src_len: Option<usize>,
    #[arg(long, global = true)]
    pub max_tgt_len: Option<usize>,
}

fn parse_exemplar(s: &str) -> std::result::Result<ExemplarMode, String> {
    s.parse().map_err(|e: exemplar_core::model::ModelError| e.to_string())
}

fn parse_split(s: &str) -> std::result::Result<SplitSpec, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad fraction `{p}`")))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] => SplitSpec::new(*a, *b, *c, 0).map_err(|e| e.to_string()),
        _ => Err("expected TRAIN,VALID,TEST fractions".into()),
    }
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for kv in &self.sets {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let m = &mut cfg.model;
        if let Some(v) = self.seed {
            m.seed = v;
        }
        if let Some(v) = self.beam {
            m.beam_size = v;
        }
        if let Some(v) = self.epochs {
            m.epochs = v;
        }
        if let Some(v) = self.lr {
            m.lr = v;
        }
        if let Some(v) = self.clip {
            m.clip_norm = v;
        }
        if let Some(v) = self.max_src_len {
            m.max_src_len = v;
        }
        if let Some(v) = self.max_tgt_len {
            m.max_tgt_len = v;
        }
        if let Some(d) = &self.dims {
            let dims: Vec<usize> = d
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad --dims `{d}`")))?;
            match dims.as_slice() {
                [e, h] => (m.embed_dim, m.hidden_dim) = (*e, *h),
                [e, h, a] => (m.embed_dim, m.hidden_dim, m.attention_dim) = (*e, *h, *a),
                _ => return Err(CliError::Usage("--dims expects EMBED,HIDDEN[,ATTENTION]".into())),
            }
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.exemplar {
            cfg.exemplar = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raw records to train/valid/test sample files
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// TRAIN,VALID,TEST project fractions
        #[arg(long, value_parser = parse_split, default_value = "0.8,0.1,0.1", conflicts_with = "no_split")]
        split: SplitSpec,
        /// Write every sample to all.jsonl
        #[arg(long)]
        no_split: bool,
        #[command(flatten)]
        common: Common,
    },
    /// BM25 index over training code tokens
    Index {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Pair each query with its retrieved exemplar
    Pair {
        #[arg(long)]
        index: PathBuf,
        /// Samples the index was built from
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip each query's own id (for training queries)
        #[arg(long)]
        exclude_self: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Train the refine model
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        train_pairs: PathBuf,
        #[arg(long, requires = "valid_pairs")]
        valid: Option<PathBuf>,
        #[arg(long, requires = "valid")]
        valid_pairs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-epoch statistics as line-delimited records
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate comments with a trained checkpoint
    Generate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// BLEU report for a predictions file
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        references: PathBuf,
        /// Training samples, for the low-frequency token table
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Length-bucket and low-frequency rows as line-delimited records
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        bucket_width: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Information-retrieval baselines
    Baseline {
        #[arg(long, value_parser = |s: &str| s.parse::<Baseline>())]
        engine: Baseline,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        exclude_self: bool,
        #[arg(long, default_value_t = DEFAULT_LSI_DIM)]
        lsi_dim: usize,
        #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
        neighbors: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Every stage from raw records to reports
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        work_dir: PathBuf,
        #[arg(long, value_parser = parse_split, default_value = "0.8,0.1,0.1")]
        split: SplitSpec,
        #[arg(long, default_value_t = 5)]
        bucket_width: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn seeded(mut split: SplitSpec, cfg: &RunConfig) -> SplitSpec {
    split.seed = cfg.model.seed;
    split
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess { input, out_dir, split, no_split, common } => {
            let cfg = common.resolve()?;
            let split = (!no_split).then(|| seeded(split, &cfg));
            stages::preprocess(&cfg, &input, &out_dir, split).map(|_| ())
        }
        Command::Index { train, out, common } => stages::index(&common.resolve()?, &train, &out),
        Command::Pair { index, corpus, queries, out, exclude_self, common } => {
            stages::pair(&common.resolve()?, &index, &corpus, &queries, &out, exclude_self)
        }
        Command::Train { train, train_pairs, valid, valid_pairs, out, log, common } => {
            let paths = TrainPaths {
                train: &train,
                train_pairs: &train_pairs,
                valid: valid.as_deref().zip(valid_pairs.as_deref()),
                out: &out,
                log: log.as_deref(),
            };
            stages::train(&common.resolve()?, &paths)
        }
        Command::Generate { checkpoint, train, queries, pairs, out, common } => {
            let paths = GeneratePaths {
                checkpoint: &checkpoint,
                train: &train,
                queries: &queries,
                pairs: pairs.as_deref(),
                out: &out,
            };
            stages::generate(&common.resolve()?, &paths)
        }
        Command::Evaluate { predictions, references, train, out, records, bucket_width, common } => {
            let paths = EvaluatePaths {
                predictions: &predictions,
                references: &references,
                train: train.as_deref(),
                out: &out,
                records: records.as_deref(),
            };
            stages::evaluate(&common.resolve()?, &paths, bucket_width).map(|_| ())
        }
        Command::Baseline { engine, train, queries, out, exclude_self, lsi_dim, neighbors, common } => {
            let settings = BaselineSettings { engine, exclude_self, lsi_dim, neighbors };
            stages::baseline(&common.resolve()?, &settings, &train, &queries, &out)
        }
        Command::Pipeline { input, work_dir, split, bucket_width, common } => {
            let cfg = common.resolve()?;
            stages::pipeline(&cfg, &input, &work_dir, seeded(split, &cfg), bucket_width).map(|_| ())
        }
    }
}
