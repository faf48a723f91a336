#![no_main]

use exemplar_core::parser::tokenize_source;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(source) = std::str::from_utf8(data) else { return };
    if let Ok(tokens) = tokenize_source(source) {
        for t in &tokens {
            assert!(!t.text.is_empty());
            assert!(source[t.offset..].starts_with(&t.text));
        }
    }
});
