#![no_main]

use libfuzzer_sys::fuzz_target;
use refine_core::surface::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse(src) else { return };
    let printed = p.to_string();
    let q = parse(&printed).expect("printed programs parse");
    assert_eq!(p.without_spans(), q.without_spans());
});
