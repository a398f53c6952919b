#![no_main]

use libfuzzer_sys::fuzz_target;
use refine_core::surface::{expand_aliases, parse};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse(src) else { return };
    if let Ok(once) = expand_aliases(&p) {
        let twice = expand_aliases(&once).expect("expanded programs have no aliases left");
        assert_eq!(once.without_spans(), twice.without_spans());
    }
});
