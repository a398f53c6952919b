#![no_main]

use libfuzzer_sys::fuzz_target;
use refine_core::logic::translate_vc;
use refine_core::surface::{expand_aliases, parse};
use refine_core::typesys::check_program;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse(src) else { return };
    let Ok(p) = expand_aliases(&p) else { return };
    for vc in check_program(&p).vcs {
        vc.check_sorts().expect("generated conditions are well sorted");
        translate_vc(&vc).expect("generated conditions translate");
    }
});
