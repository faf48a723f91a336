#![no_main]

use exemplar_core::corpus::extract_comment;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Some(tokens) = extract_comment(&text) {
        assert!(!tokens.is_empty());
    }
});
