#![no_main]

use exemplar_core::model::RefineModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = RefineModel::from_bytes(data) {
        let bytes = model.to_bytes();
        assert_eq!(RefineModel::from_bytes(&bytes).unwrap().to_bytes(), bytes);
    }
});
