#![no_main]

use epic_core::wc::{parse_program, print_program};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_program(src) else { return };
    let printed = print_program(&p);
    let q = parse_program(&printed).unwrap_or_else(|e| panic!("printed form does not parse: {e}\n{printed}"));
    assert_eq!(p, q, "{printed}");
});
