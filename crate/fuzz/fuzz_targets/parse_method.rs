#![no_main]

use exemplar_core::parser::{is_well_formed, parse_method, sbt, sbt_ao};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let source = String::from_utf8_lossy(data);
    if let Ok(ast) = parse_method(&source) {
        let full = sbt(&ast);
        assert_eq!(full.len(), 4 * ast.node_count());
        assert!(is_well_formed(&full));
        assert_eq!(sbt_ao(&ast).len(), full.len());
    }
});
