#![no_main]

use exemplar_core::formats::parse_key_values;
use exemplar_core::model::ModelConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(pairs) = parse_key_values(&text) {
        if let Ok(cfg) = ModelConfig::from_pairs(&pairs) {
            assert_eq!(ModelConfig::from_pairs(&cfg.to_pairs()).unwrap(), cfg);
        }
    }
});
