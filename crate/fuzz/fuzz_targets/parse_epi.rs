#![no_main]

use epic_core::epi::{alpha_eq, parse_process, print_process};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_process(src) else { return };
    let printed = print_process(&p);
    let q = parse_process(&printed).unwrap_or_else(|e| panic!("printed form does not parse: {e}\n{printed}"));
    assert!(alpha_eq(&p, &q), "{printed}");
});
