#![no_main]

use exemplar_core::formats::read_jsonl;
use exemplar_core::retrieval::ExemplarPair;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let _ = read_jsonl::<ExemplarPair>(&text);
});
