#![no_main]

use exemplar_core::corpus::{preprocess_record, CorpusMode, RawRecord};
use exemplar_core::formats::read_jsonl;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let (records, _) = read_jsonl::<RawRecord>(&text);
    for rec in &records {
        let _ = preprocess_record(rec, CorpusMode::Standard);
        let _ = preprocess_record(rec, CorpusMode::Challenge);
    }
});
