#![no_main]

use libfuzzer_sys::fuzz_target;
use refine_core::logic::Sort;

fuzz_target!(|data: &[u8]| {
    if let Ok(raw) = std::str::from_utf8(data) {
        let declared = [("x".to_string(), Sort::Int), ("b".to_string(), Sort::Bool)];
        let _ = refine_core::solver::parse_model(raw, &declared);
    }
});
