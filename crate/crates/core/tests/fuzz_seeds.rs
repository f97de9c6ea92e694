//! Replays the checked-in fuzz seeds through the fuzz targets' assertions.

use std::fs;
use std::path::PathBuf;

use epic_core::encode::check::{correspond, CorrespondVerdict};
use epic_core::epi::{alpha_eq, now_safe, parse_process, parse_tenv, print_process, print_tenv, typecheck_process, Runner, Strategy};
use epic_core::wc::{parse_program, print_program, run_program};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_epi_seeds() {
    for (name, src) in seeds("parse_epi") {
        let p = parse_process(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let q = parse_process(&print_process(&p)).unwrap();
        assert!(alpha_eq(&p, &q), "{name}");
    }
}

#[test]
fn parse_tenv_seeds() {
    for (name, src) in seeds("parse_tenv") {
        let g = parse_tenv(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_tenv(&print_tenv(&g)).unwrap(), g, "{name}");
    }
}

#[test]
fn parse_wc_seeds() {
    for (name, src) in seeds("parse_wc") {
        let p = parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p, "{name}");
    }
}

#[test]
fn check_epi_seeds() {
    let mut typed = 0;
    for (name, src) in seeds("check_epi") {
        let (tenv, process) = src.split_once("\n%%\n").unwrap_or_else(|| panic!("{name}: no separator"));
        let gamma = parse_tenv(tenv).unwrap_or_else(|e| panic!("{name}: {e}"));
        let p = parse_process(process).unwrap_or_else(|e| panic!("{name}: {e}"));
        if typecheck_process(&gamma, &p).is_ok() {
            typed += 1;
            assert!(now_safe(&gamma, &p), "{name}");
            let mut runner = Runner::new(&p, Strategy::Deterministic, 0);
            runner.run(20);
            assert!(now_safe(&gamma, runner.state()), "{name}");
        }
    }
    assert!(typed > 0);
}

#[test]
fn wc_pipeline_seeds() {
    for (name, src) in seeds("wc_pipeline") {
        let p = parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_ne!(correspond(&p).verdict, CorrespondVerdict::Disagree, "{name}");
        let _ = run_program(&p, 10_000);
    }
}
