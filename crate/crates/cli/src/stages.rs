//! Pipeline stages. Each reads its inputs from files, writes its artifact
//! and a `<artifact>.manifest.json` next to it.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::anyhow;
use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use exemplar_core::baselines::{predict, Baseline, BaselineOptions, DEFAULT_LSI_DIM, DEFAULT_NEIGHBORS};
use exemplar_core::corpus::{
    assign_ids, deduplicate, preprocess_record, split_by_project, split_stats, RawRecord, Sample, SkipReason,
    SplitSpec, Splits,
};
use exemplar_core::eval::{
    corpus_bleu, format_bleu, length_bucket_report, low_freq_report, token_frequencies, BleuReport, DEFAULT_THRESHOLDS,
};
use exemplar_core::formats::{format_predictions, parse_predictions, read_jsonl, write_jsonl};
use exemplar_core::model::{build_examples, train as fit, RefineModel};
use exemplar_core::retrieval::{build_index, decode_index, encode_index, pair_exemplars, ExemplarPair};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Line-delimited records; malformed lines are logged and skipped.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let (items, errors) = read_jsonl(&read_text(path)?);
    for (line, err) in &errors {
        warn!("{}:{line}: skipped malformed line: {err}", path.display());
    }
    if !errors.is_empty() {
        warn!("skipped {} malformed line(s) in {}", errors.len(), path.display());
    }
    Ok(items)
}

fn write_records<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    write_file(path, write_jsonl(items))
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

fn write_manifest(
    manifest: &Path,
    stage: &str,
    cfg: &RunConfig,
    inputs: &[&Path],
    outputs: &[&Path],
    started: Instant,
) -> Result<()> {
    let config: BTreeMap<String, String> = cfg.to_pairs().into_iter().collect();
    let body = json!({
        "stage": stage,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.model.seed,
        "config": config,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "wall_time_secs": started.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&body).map_err(|e| CliError::Data(e.into()))?;
    write_file(manifest, text + "\n")
}

fn skip_key(reason: &SkipReason) -> &'static str {
    match reason {
        SkipReason::EmptySource => "empty_source",
        SkipReason::NonAscii => "non_ascii",
        SkipReason::NoComment => "no_comment",
        SkipReason::AutoGenerated => "auto_generated",
        SkipReason::Lex(_) => "lex_error",
        SkipReason::Parse(_) => "parse_error",
        SkipReason::EmptyCode => "empty_code",
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PreprocessSummary {
    pub records: usize,
    pub malformed: usize,
    pub skipped: BTreeMap<String, usize>,
    pub duplicates: usize,
    pub written: BTreeMap<String, usize>,
}

/// Raw records to samples. With a project split the output is
/// `train/valid/test.jsonl`; without one every sample goes to `all.jsonl`.
pub fn preprocess(
    cfg: &RunConfig,
    input: &Path,
    out_dir: &Path,
    split: Option<SplitSpec>,
) -> Result<PreprocessSummary> {
    let started = Instant::now();
    let (records, errors): (Vec<RawRecord>, _) = read_jsonl(&read_text(input)?);
    let mut summary =
        PreprocessSummary { records: records.len() + errors.len(), malformed: errors.len(), ..Default::default() };
    for (line, err) in &errors {
        warn!("{}:{line}: skipped malformed record: {err}", input.display());
    }
    let mut protos = Vec::with_capacity(records.len());
    for rec in &records {
        match preprocess_record(rec, cfg.mode) {
            Ok(p) => protos.push(p),
            Err(reason) => *summary.skipped.entry(skip_key(&reason).to_string()).or_default() += 1,
        }
    }
    let before = protos.len();
    let samples = assign_ids(deduplicate(protos));
    summary.duplicates = before - samples.len();

    let parts: Vec<(&str, Vec<Sample>)> = match split {
        Some(spec) => {
            let Splits { train, valid, test } = split_by_project(samples, &spec);
            vec![("train", train), ("valid", valid), ("test", test)]
        }
        None => vec![("all", samples)],
    };
    let mut outputs = Vec::new();
    let mut stats = serde_json::Map::new();
    for (name, part) in &parts {
        let path = out_dir.join(format!("{name}.jsonl"));
        write_records(&path, part)?;
        let s = split_stats(part);
        stats.insert(
            name.to_string(),
            json!({
                "count": s.count,
                "avg_comment_tokens": s.avg_comment_tokens,
                "avg_code_tokens": s.avg_code_tokens,
                "avg_sbt_tokens": s.avg_sbt_tokens,
            }),
        );
        summary.written.insert(name.to_string(), part.len());
        outputs.push(path);
    }
    let stats_path = out_dir.join("stats.json");
    let report = json!({ "splits": stats, "preprocess": &summary });
    write_file(&stats_path, serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.into()))? + "\n")?;
    outputs.push(stats_path);
    info!(
        "preprocess: {} records, {} malformed, {} filtered, {} duplicates, written {:?}",
        summary.records,
        summary.malformed,
        summary.skipped.values().sum::<usize>(),
        summary.duplicates,
        summary.written
    );
    let outs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    write_manifest(&out_dir.join("preprocess.manifest.json"), "preprocess", cfg, &[input], &outs, started)?;
    Ok(summary)
}

pub fn index(cfg: &RunConfig, train: &Path, out: &Path) -> Result<()> {
    let started = Instant::now();
    let samples: Vec<Sample> = read_records(train)?;
    let idx = build_index(&samples).map_err(|e| CliError::Data(e.into()))?;
    write_file(out, encode_index(&idx))?;
    info!("index: {} documents, avg length {:.2}", idx.doc_count(), idx.avg_len());
    write_manifest(&manifest_path(out), "index", cfg, &[train], &[out], started)
}

pub fn pair(
    cfg: &RunConfig,
    index_path: &Path,
    corpus: &Path,
    queries: &Path,
    out: &Path,
    exclude_self: bool,
) -> Result<()> {
    let started = Instant::now();
    let idx = decode_index(&read_bytes(index_path)?)
        .map_err(|e| CliError::Data(anyhow!(e).context(index_path.display().to_string())))?;
    let corpus_samples: Vec<Sample> = read_records(corpus)?;
    let query_samples: Vec<Sample> = read_records(queries)?;
    let pairs = pair_exemplars(&query_samples, &idx, &corpus_samples, exclude_self);
    let empty = pairs.iter().filter(|p| p.is_empty()).count();
    write_records(out, &pairs)?;
    info!("pair: {} queries, {} without an exemplar", pairs.len(), empty);
    write_manifest(&manifest_path(out), "pair", cfg, &[index_path, corpus, queries], &[out], started)
}

pub struct TrainPaths<'a> {
    pub train: &'a Path,
    pub train_pairs: &'a Path,
    pub valid: Option<(&'a Path, &'a Path)>,
    pub out: &'a Path,
    pub log: Option<&'a Path>,
}

pub fn train(cfg: &RunConfig, paths: &TrainPaths<'_>) -> Result<()> {
    let started = Instant::now();
    cfg.validate()?;
    let train_samples: Vec<Sample> = read_records(paths.train)?;
    if train_samples.is_empty() {
        return Err(CliError::data(format!("no training samples in {}", paths.train.display())));
    }
    let train_pairs: Vec<ExemplarPair> = read_records(paths.train_pairs)?;
    let (c, s, m) = RefineModel::vocabularies(&train_samples, &cfg.model);
    let mut model = RefineModel::new(cfg.model.clone(), c, s, m)?;
    let seed = cfg.model.seed;
    let train_ex = build_examples(&model, &train_samples, &train_pairs, &train_samples, cfg.exemplar, seed)?;
    let mut inputs = vec![paths.train, paths.train_pairs];
    let valid_ex = match paths.valid {
        Some((v, vp)) => {
            inputs.extend([v, vp]);
            let vs: Vec<Sample> = read_records(v)?;
            let vpairs: Vec<ExemplarPair> = read_records(vp)?;
            build_examples(&model, &vs, &vpairs, &train_samples, cfg.exemplar, seed.wrapping_add(1))?
        }
        None => Vec::new(),
    };
    info!(
        "train: {} samples, {} validation, {} parameters",
        train_ex.len(),
        valid_ex.len(),
        model.params.parameter_count()
    );
    let outcome = fit(&mut model, &train_ex, &valid_ex, |_| {})?;
    write_file(paths.out, model.to_bytes())?;
    let mut outputs = vec![paths.out];
    if let Some(log) = paths.log {
        write_records(log, &outcome.epochs)?;
        outputs.push(log);
    }
    info!("train: kept epoch {}", outcome.best_epoch);
    write_manifest(&manifest_path(paths.out), "train", cfg, &inputs, &outputs, started)
}

pub struct GeneratePaths<'a> {
    pub checkpoint: &'a Path,
    pub train: &'a Path,
    pub queries: &'a Path,
    /// Needed in retrieved mode only.
    pub pairs: Option<&'a Path>,
    pub out: &'a Path,
}

pub fn generate(cfg: &RunConfig, paths: &GeneratePaths<'_>) -> Result<()> {
    let started = Instant::now();
    let model = RefineModel::from_bytes(&read_bytes(paths.checkpoint)?)
        .map_err(|e| CliError::Data(anyhow!(e).context(paths.checkpoint.display().to_string())))?;
    let train_samples: Vec<Sample> = read_records(paths.train)?;
    let queries: Vec<Sample> = read_records(paths.queries)?;
    let mut inputs = vec![paths.checkpoint, paths.train, paths.queries];
    let pairs: Vec<ExemplarPair> = match paths.pairs {
        Some(p) => {
            inputs.push(p);
            read_records(p)?
        }
        None if cfg.exemplar == exemplar_core::model::ExemplarMode::Retrieved => {
            return Err(CliError::Usage("retrieved exemplars need --pairs".into()));
        }
        None => Vec::new(),
    };
    let examples = build_examples(&model, &queries, &pairs, &train_samples, cfg.exemplar, cfg.model.seed)?;
    let beam = cfg.model.beam_size;
    let preds = examples.iter().map(|ex| Ok((ex.id, model.generate(ex, beam)?))).collect::<Result<Vec<_>>>()?;
    write_file(paths.out, format_predictions(&preds))?;
    info!("generate: {} predictions, beam {beam}, {} exemplars", preds.len(), cfg.exemplar);
    write_manifest(&manifest_path(paths.out), "generate", cfg, &inputs, &[paths.out], started)
}

/// Predictions aligned to `references` by sample id.
pub fn align_predictions(preds: &[(u64, Vec<String>)], references: &[Sample]) -> Result<Vec<Vec<String>>> {
    let by_id: HashMap<u64, &Vec<String>> = preds.iter().map(|(id, t)| (*id, t)).collect();
    references
        .iter()
        .map(|r| {
            by_id
                .get(&r.id)
                .map(|t| (*t).clone())
                .ok_or_else(|| CliError::data(format!("no prediction for sample {}", r.id)))
        })
        .collect()
}

pub struct EvaluatePaths<'a> {
    pub predictions: &'a Path,
    pub references: &'a Path,
    /// Training comments for the low-frequency table.
    pub train: Option<&'a Path>,
    pub out: &'a Path,
    pub records: Option<&'a Path>,
}

pub fn evaluate(cfg: &RunConfig, paths: &EvaluatePaths<'_>, bucket_width: usize) -> Result<BleuReport> {
    let started = Instant::now();
    let preds = parse_predictions(&read_text(paths.predictions)?)
        .map_err(|e| CliError::Data(anyhow!(e).context(paths.predictions.display().to_string())))?;
    let references: Vec<Sample> = read_records(paths.references)?;
    let candidates = align_predictions(&preds, &references)?;
    let refs: Vec<Vec<String>> = references.iter().map(|s| s.comment_tokens.clone()).collect();
    let report = corpus_bleu(&candidates, &refs, 4).map_err(|e| CliError::Data(e.into()))?;
    let mut text = format_bleu(&report);
    text.push_str(&format!("samples {}\n", refs.len()));
    write_file(paths.out, &text)?;
    let mut inputs = vec![paths.predictions, paths.references];
    let mut outputs = vec![paths.out];

    if let Some(records_path) = paths.records {
        let code_lens: Vec<usize> = references.iter().map(|s| s.code_tokens.len()).collect();
        let comment_lens: Vec<usize> = refs.iter().map(Vec::len).collect();
        let lengths = length_bucket_report(&candidates, &refs, &code_lens, &comment_lens, bucket_width)
            .map_err(|e| CliError::Data(e.into()))?;
        let mut lines = Vec::new();
        for (kind, rows) in [("code_length", &lengths.by_code_length), ("comment_length", &lengths.by_comment_length)] {
            for b in rows {
                lines.push(json!({"kind": kind, "length": b.length, "mean_bleu": b.mean_bleu, "count": b.count}));
            }
        }
        if let Some(train_path) = paths.train {
            inputs.push(train_path);
            let train_samples: Vec<Sample> = read_records(train_path)?;
            let comments: Vec<Vec<String>> = train_samples.into_iter().map(|s| s.comment_tokens).collect();
            let freqs = token_frequencies(&comments);
            let rows = low_freq_report(&candidates, &refs, &freqs, &DEFAULT_THRESHOLDS)
                .map_err(|e| CliError::Data(e.into()))?;
            for r in rows {
                lines.push(json!({
                    "kind": "low_frequency",
                    "threshold": r.threshold,
                    "correct": r.correct,
                    "reference_total": r.reference_total,
                }));
            }
        }
        write_records(records_path, &lines)?;
        outputs.push(records_path);
    }
    info!("evaluate: BLEU {:.2} over {} samples", report.bleu, refs.len());
    write_manifest(&manifest_path(paths.out), "evaluate", cfg, &inputs, &outputs, started)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineSettings {
    pub engine: Baseline,
    pub exclude_self: bool,
    pub lsi_dim: usize,
    pub neighbors: usize,
}

impl BaselineSettings {
    pub fn new(engine: Baseline) -> Self {
        Self { engine, exclude_self: false, lsi_dim: DEFAULT_LSI_DIM, neighbors: DEFAULT_NEIGHBORS }
    }
}

pub fn baseline(cfg: &RunConfig, settings: &BaselineSettings, train: &Path, queries: &Path, out: &Path) -> Result<()> {
    let started = Instant::now();
    let train_samples: Vec<Sample> = read_records(train)?;
    let query_samples: Vec<Sample> = read_records(queries)?;
    let opts = BaselineOptions { lsi_dim: settings.lsi_dim, neighbors: settings.neighbors, seed: cfg.model.seed };
    let preds = predict(settings.engine, &train_samples, &query_samples, settings.exclude_self, &opts)
        .map_err(|e| CliError::Data(e.into()))?;
    write_file(out, format_predictions(&preds))?;
    info!("baseline {}: {} predictions", settings.engine, preds.len());
    write_manifest(
        &manifest_path(out),
        &format!("baseline-{}", settings.engine),
        cfg,
        &[train, queries],
        &[out],
        started,
    )
}

/// Every stage in order under `work_dir`. Returns the composite BLEU of the
/// refine model and of each baseline on the test split.
pub fn pipeline(
    cfg: &RunConfig,
    input: &Path,
    work_dir: &Path,
    split: SplitSpec,
    bucket_width: usize,
) -> Result<BTreeMap<String, f64>> {
    let corpus = work_dir.join("corpus");
    preprocess(cfg, input, &corpus, Some(split))?;
    let train_path = corpus.join("train.jsonl");
    let valid_path = corpus.join("valid.jsonl");
    let test_path = corpus.join("test.jsonl");
    let index_path = work_dir.join("index.bin");
    index(cfg, &train_path, &index_path)?;
    let pairs = |name: &str| work_dir.join("pairs").join(format!("{name}.jsonl"));
    pair(cfg, &index_path, &train_path, &train_path, &pairs("train"), true)?;
    pair(cfg, &index_path, &train_path, &valid_path, &pairs("valid"), false)?;
    pair(cfg, &index_path, &train_path, &test_path, &pairs("test"), false)?;

    let checkpoint = work_dir.join("model.ckpt");
    let valid_pairs = pairs("valid");
    train(
        cfg,
        &TrainPaths {
            train: &train_path,
            train_pairs: &pairs("train"),
            valid: Some((&valid_path, &valid_pairs)),
            out: &checkpoint,
            log: Some(&work_dir.join("train_log.jsonl")),
        },
    )?;

    let mut scores = BTreeMap::new();
    let mut score = |name: &str, preds: &Path| -> Result<()> {
        let report = evaluate(
            cfg,
            &EvaluatePaths {
                predictions: preds,
                references: &test_path,
                train: Some(&train_path),
                out: &work_dir.join("reports").join(format!("{name}.txt")),
                records: Some(&work_dir.join("reports").join(format!("{name}.records.jsonl"))),
            },
            bucket_width,
        )?;
        scores.insert(name.to_string(), report.bleu);
        Ok(())
    };

    let refine_preds = work_dir.join("predictions").join("refine.tsv");
    let test_pairs = pairs("test");
    generate(
        cfg,
        &GeneratePaths {
            checkpoint: &checkpoint,
            train: &train_path,
            queries: &test_path,
            pairs: Some(&test_pairs),
            out: &refine_preds,
        },
    )?;
    score("refine", &refine_preds)?;
    for engine in [Baseline::Retrieve, Baseline::Vsm, Baseline::Lsi, Baseline::NnGen] {
        let out = work_dir.join("predictions").join(format!("{engine}.tsv"));
        baseline(cfg, &BaselineSettings::new(engine), &train_path, &test_path, &out)?;
        score(&engine.to_string(), &out)?;
    }
    for (name, bleu) in &scores {
        info!("pipeline: {name:<10} BLEU {bleu:.2}");
    }
    Ok(scores)
}
