#![no_main]

use exemplar_core::corpus::Sample;
use exemplar_core::formats::{read_jsonl, write_jsonl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let (samples, _) = read_jsonl::<Sample>(&text);
    let (again, errors) = read_jsonl::<Sample>(&write_jsonl(&samples));
    assert!(errors.is_empty());
    assert_eq!(again, samples);
});
