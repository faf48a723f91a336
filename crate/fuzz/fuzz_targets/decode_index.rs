#![no_main]

use exemplar_core::retrieval::{decode_index, encode_index};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(index) = decode_index(data) {
        let bytes = encode_index(&index);
        assert_eq!(encode_index(&decode_index(&bytes).unwrap()), bytes);
    }
});
