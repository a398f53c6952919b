#![no_main]

use libfuzzer_sys::fuzz_target;
use refine_core::solver::sexp::read_all;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(forms) = read_all(src) {
        let printed: Vec<String> = forms.iter().map(ToString::to_string).collect();
        let again = read_all(&printed.join("\n")).expect("printed forms read back");
        assert_eq!(forms, again);
    }
});
