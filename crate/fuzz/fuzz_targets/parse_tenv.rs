#![no_main]

use epic_core::epi::{check_wellformed, parse_tenv, print_tenv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(gamma) = parse_tenv(src) else { return };
    let _ = check_wellformed(&gamma);
    let printed = print_tenv(&gamma);
    let again = parse_tenv(&printed).unwrap_or_else(|e| panic!("printed form does not parse: {e}\n{printed}"));
    assert_eq!(gamma, again, "{printed}");
});
