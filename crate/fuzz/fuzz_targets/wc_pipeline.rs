#![no_main]

use epic_core::encode::check::{correspond, CorrespondVerdict};
use epic_core::wc::{parse_program, run_program};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_program(src) else { return };
    let report = correspond(&p);
    assert_ne!(report.verdict, CorrespondVerdict::Disagree, "{report:?}");
    let _ = run_program(&p, 10_000);
});
