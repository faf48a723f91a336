//! Replays the checked-in fuzz corpora, plus seeded byte-level mutations of
//! each seed, through the same checks the fuzz targets make.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exemplar_core::autodiff::ParamStore;
use exemplar_core::corpus::{extract_comment, preprocess_record, CorpusMode, RawRecord, Sample};
use exemplar_core::formats::{format_predictions, parse_key_values, parse_predictions, read_jsonl, write_jsonl};
use exemplar_core::model::{ModelConfig, RefineModel};
use exemplar_core::parser::{is_well_formed, parse_method, sbt, sbt_ao, tokenize_source};
use exemplar_core::retrieval::{decode_index, encode_index, ExemplarPair};

const MUTANTS_PER_SEED: usize = 300;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let out: Vec<Vec<u8>> = files.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn mutate(seed: &[u8], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut data = seed.to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let at = if data.is_empty() { 0 } else { rng.gen_range(0..data.len()) };
        match rng.gen_range(0..5) {
            0 if !data.is_empty() => data[at] ^= 1 << rng.gen_range(0..8),
            1 if !data.is_empty() => data[at] = rng.gen(),
            2 => data.insert(at, rng.gen()),
            3 if !data.is_empty() => {
                data.remove(at);
            }
            _ => data.truncate(at),
        }
    }
    data
}

fn exercise(target: &str, check: impl Fn(&[u8])) {
    let mut rng = ChaCha8Rng::seed_from_u64(target.len() as u64);
    for seed in seeds(target) {
        check(&seed);
        for _ in 0..MUTANTS_PER_SEED {
            check(&mutate(&seed, &mut rng));
        }
    }
}

#[test]
fn tokenize_source_seeds_and_mutants() {
    exercise("tokenize_source", |data| {
        let Ok(source) = std::str::from_utf8(data) else { return };
        if let Ok(tokens) = tokenize_source(source) {
            for t in &tokens {
                assert!(!t.text.is_empty());
                assert!(source[t.offset..].starts_with(&t.text));
            }
        }
    });
}

#[test]
fn parse_method_seeds_and_mutants() {
    exercise("parse_method", |data| {
        let source = String::from_utf8_lossy(data);
        if let Ok(ast) = parse_method(&source) {
            let full = sbt(&ast);
            assert_eq!(full.len(), 4 * ast.node_count());
            assert!(is_well_formed(&full));
            assert_eq!(sbt_ao(&ast).len(), full.len());
        }
    });
}

#[test]
fn extract_comment_seeds_and_mutants() {
    exercise("extract_comment", |data| {
        if let Some(tokens) = extract_comment(&String::from_utf8_lossy(data)) {
            assert!(!tokens.is_empty());
        }
    });
}

#[test]
fn raw_records_seeds_and_mutants() {
    exercise("raw_records", |data| {
        let (records, _) = read_jsonl::<RawRecord>(&String::from_utf8_lossy(data));
        for rec in &records {
            let _ = preprocess_record(rec, CorpusMode::Standard);
            let _ = preprocess_record(rec, CorpusMode::Challenge);
        }
    });
}

#[test]
fn sample_records_seeds_and_mutants() {
    exercise("sample_records", |data| {
        let (samples, _) = read_jsonl::<Sample>(&String::from_utf8_lossy(data));
        let (again, errors) = read_jsonl::<Sample>(&write_jsonl(&samples));
        assert!(errors.is_empty());
        assert_eq!(again, samples);
    });
}

#[test]
fn pair_records_seeds_and_mutants() {
    exercise("pair_records", |data| {
        let _ = read_jsonl::<ExemplarPair>(&String::from_utf8_lossy(data));
    });
}

#[test]
fn predictions_seeds_and_mutants() {
    exercise("predictions", |data| {
        if let Ok(preds) = parse_predictions(&String::from_utf8_lossy(data)) {
            assert_eq!(parse_predictions(&format_predictions(&preds)).unwrap(), preds);
        }
    });
}

#[test]
fn settings_seeds_and_mutants() {
    exercise("settings", |data| {
        if let Ok(pairs) = parse_key_values(&String::from_utf8_lossy(data)) {
            if let Ok(cfg) = ModelConfig::from_pairs(&pairs) {
                assert_eq!(ModelConfig::from_pairs(&cfg.to_pairs()).unwrap(), cfg);
            }
        }
    });
}

#[test]
fn decode_index_seeds_and_mutants() {
    exercise("decode_index", |data| {
        if let Ok(index) = decode_index(data) {
            let bytes = encode_index(&index);
            assert_eq!(encode_index(&decode_index(&bytes).unwrap()), bytes);
        }
    });
}

#[test]
fn decode_checkpoint_seeds_and_mutants() {
    exercise("decode_checkpoint", |data| {
        if let Ok(model) = RefineModel::from_bytes(data) {
            let bytes = model.to_bytes();
            assert_eq!(RefineModel::from_bytes(&bytes).unwrap().to_bytes(), bytes);
        }
    });
}

#[test]
fn decode_params_seeds_and_mutants() {
    exercise("decode_params", |data| {
        if let Ok(store) = ParamStore::decode(data) {
            let bytes = store.encode();
            assert_eq!(ParamStore::decode(&bytes).unwrap().encode(), bytes);
        }
    });
}

#[test]
fn valid_seeds_decode() {
    assert!(seeds("decode_index").iter().all(|s| decode_index(s).is_ok()));
    assert!(seeds("decode_checkpoint").iter().all(|s| RefineModel::from_bytes(s).is_ok()));
    assert!(seeds("decode_params").iter().all(|s| ParamStore::decode(s).is_ok()));
    assert!(seeds("parse_method").iter().filter(|s| parse_method(&String::from_utf8_lossy(s)).is_ok()).count() >= 3);
}
