#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = refine_core::surface::parse(src);
        let _ = refine_core::surface::parse_term(src);
        let _ = refine_core::surface::parse_type(src);
    }
});
