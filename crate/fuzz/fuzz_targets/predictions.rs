#![no_main]

use exemplar_core::formats::{format_predictions, parse_predictions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(preds) = parse_predictions(&text) {
        assert_eq!(parse_predictions(&format_predictions(&preds)).unwrap(), preds);
    }
});
