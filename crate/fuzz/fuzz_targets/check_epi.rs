#![no_main]

use epic_core::epi::{now_safe, parse_process, parse_tenv, typecheck_process, Runner, Strategy};
use libfuzzer_sys::fuzz_target;

// Input: a type environment, a line `%%`, then a process.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Some((tenv, process)) = src.split_once("\n%%\n") else { return };
    let (Ok(gamma), Ok(p)) = (parse_tenv(tenv), parse_process(process)) else { return };
    if typecheck_process(&gamma, &p).is_ok() {
        assert!(now_safe(&gamma, &p), "well-typed but not now-safe");
        let mut runner = Runner::new(&p, Strategy::Deterministic, 0);
        runner.run(20);
        assert!(now_safe(&gamma, runner.state()), "reached an unsafe state");
    }
});
