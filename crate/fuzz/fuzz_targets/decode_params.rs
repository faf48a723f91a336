#![no_main]

use exemplar_core::autodiff::ParamStore;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = ParamStore::decode(data) {
        let bytes = store.encode();
        assert_eq!(ParamStore::decode(&bytes).unwrap().encode(), bytes);
    }
});
