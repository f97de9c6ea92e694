use epic_core::encode::check::{agree, check_unit, correspond, AgreeVerdict, CorrespondVerdict};
use epic_core::encode::compile;
use epic_core::epi::{alpha_eq, print_process, safe_bounded, Strategy as RunStrategy};
use epic_core::harness::{inject_error, WcGenerator};
use epic_core::wc::{print_program, typecheck_program, WcProgram};
use proptest::prelude::*;

fn program(seed: u64) -> WcProgram {
    WcGenerator::new(seed).program()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compilation_is_deterministic(seed in any::<u64>()) {
        let p = program(seed);
        let a = compile(&p).unwrap();
        let b = compile(&p).unwrap();
        prop_assert_eq!(print_process(&a.process), print_process(&b.process));
        prop_assert_eq!(a.gamma, b.gamma);
        prop_assert_eq!(a.decoder, b.decoder);
    }

    #[test]
    fn generated_programs_translate_to_typed_processes(seed in any::<u64>()) {
        let p = program(seed);
        let unit = compile(&p).unwrap();
        prop_assert!(check_unit(&unit).is_ok(), "{}", p);
        prop_assert_eq!(correspond(&p).verdict, CorrespondVerdict::AgreePositive);
    }

    #[test]
    fn injected_errors_never_disagree(seed in any::<u64>(), site in any::<u64>()) {
        let q = inject_error(&program(seed), site);
        let report = correspond(&q);
        prop_assert_ne!(report.verdict, CorrespondVerdict::Disagree, "{}\n{:?}", print_program(&q), report);
        if report.verdict == CorrespondVerdict::AgreeNegative {
            prop_assert!(typecheck_program(&q).is_err());
        }
    }

    #[test]
    fn runs_agree_under_both_strategies(seed in any::<u64>(), run_seed in any::<u64>()) {
        let p = program(seed);
        let det = agree(&p, 10_000, RunStrategy::Deterministic, 0).unwrap();
        prop_assert_eq!(det.verdict, AgreeVerdict::Match, "{}", det.detail);
        let rnd = agree(&p, 10_000, RunStrategy::Random, run_seed).unwrap();
        prop_assert_eq!(rnd.verdict, AgreeVerdict::Match, "{}", rnd.detail);
        prop_assert_eq!(det.wc_fields, rnd.epi_fields);
    }

    #[test]
    fn printed_translation_reparses(seed in any::<u64>()) {
        let unit = compile(&program(seed)).unwrap();
        let text = print_process(&unit.process);
        prop_assert!(alpha_eq(&unit.process, &epic_core::epi::parse_process(&text).unwrap()));
    }
}

#[test]
fn compiled_programs_are_safe_to_a_bounded_depth() {
    let mut g = WcGenerator::new(7);
    let mut checked = 0;
    for _ in 0..8 {
        let p = g.program();
        let unit = compile(&p).unwrap();
        if let Ok(safe) = safe_bounded(&unit.gamma, &unit.process, 10, 20_000) {
            assert!(safe, "{p}");
            checked += 1;
        }
    }
    assert!(checked >= 4, "only {checked} programs stayed under the state cap");
}
