use std::collections::{BTreeMap, BTreeSet};

use epic_core::epi::semantics::Analysis;
use epic_core::epi::subst::Substitution;
use epic_core::epi::{
    alpha_eq, canonical, eval_expr, explore_tau, free_names, parse_process, print_process, run_tau, substitute,
    type_of_subject, typecheck_process, typecheck_process_with, BaseType, Expr, Label, Name, Operator, Process,
    Strategy as RunStrategy, TypeEnv, TypingOptions, Value, DEFAULT_FRONTIER_CAP,
};
use epic_core::harness::{FuzzConfig, Generator};
use proptest::prelude::*;

fn case(seed: u64) -> (TypeEnv, Process) {
    Generator::new(FuzzConfig {
        seed,
        count: 1,
        ..FuzzConfig::default()
    })
    .case()
}

fn mutated_case(seed: u64) -> (TypeEnv, Process) {
    Generator::mutated(FuzzConfig {
        seed,
        count: 1,
        ..FuzzConfig::default()
    })
    .case()
}

/// Renames every binder to a fresh name.
fn rename_binders(p: &Process) -> Process {
    let fresh = |n: &Name| Name::new(format!("{}_r", n.as_str()));
    let rename = |names: &[Name], body: &Process| {
        let sigma: Substitution = names.iter().map(|n| (n.clone(), Value::Name(fresh(n)))).collect();
        rename_binders(&substitute(body, &sigma))
    };
    match p {
        Process::Nil => Process::Nil,
        Process::Input { subject, binders, body } => Process::input(
            subject.clone(),
            binders.iter().map(fresh).collect(),
            rename(binders, body),
        ),
        Process::Output { subject, objects, body } => {
            Process::output(subject.clone(), objects.clone(), rename_binders(body))
        }
        Process::Par(l, r) => Process::par(rename_binders(l), rename_binders(r)),
        Process::Restrict { bindings, body } => {
            let names: Vec<Name> = bindings.iter().map(|(n, _)| n.clone()).collect();
            Process::Restrict {
                bindings: bindings.iter().map(|(n, t)| (fresh(n), t.clone())).collect(),
                body: std::sync::Arc::new(rename(&names, body)),
            }
        }
        Process::Repl(body) => Process::repl(rename_binders(body)),
        Process::Sum(branches) => Process::sum(branches.iter().map(|(g, b)| (g.clone(), rename_binders(b))).collect()),
    }
}

/// `P | Q` rebuilt as `Q | P`, looking through the restriction a
/// communication may put around it.
fn swap_top(p: &Process) -> Process {
    match p {
        Process::Par(l, r) => Process::Par(r.clone(), l.clone()),
        Process::Restrict { bindings, body } => Process::Restrict {
            bindings: bindings.clone(),
            body: std::sync::Arc::new(swap_top(body)),
        },
        other => other.clone(),
    }
}

fn tau_targets(p: &Process) -> BTreeSet<String> {
    Analysis::new(p)
        .tau_transitions()
        .into_iter()
        .map(|t| canonical(&t.target).to_string())
        .collect()
}

fn closed_expr(sort: BaseType, depth: u32) -> BoxedStrategy<Expr> {
    let leaf = match sort {
        BaseType::Bool => any::<bool>().prop_map(Expr::bool).boxed(),
        _ => (-50i64..50).prop_map(Expr::int).boxed(),
    };
    if depth == 0 {
        return leaf;
    }
    let (int, boolean) = (closed_expr(BaseType::Int, depth - 1), closed_expr(BaseType::Bool, depth - 1));
    let compound = if sort == BaseType::Bool {
        prop_oneof![
            (int.clone(), int.clone()).prop_map(|(a, b)| Expr::op(Operator::Lt, vec![a, b])),
            (int.clone(), int).prop_map(|(a, b)| Expr::op(Operator::Eq, vec![a, b])),
            boolean.clone().prop_map(|a| Expr::op(Operator::Not, vec![a])),
            (boolean.clone(), boolean).prop_map(|(a, b)| Expr::op(Operator::And, vec![a, b])),
        ]
        .boxed()
    } else {
        (int.clone(), int, prop::sample::select(vec![Operator::Add, Operator::Sub, Operator::Mul]))
            .prop_map(|(a, b, op)| Expr::op(op, vec![a, b]))
            .boxed()
    };
    prop_oneof![leaf, compound].boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_alpha_identity(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let q = parse_process(&print_process(&p)).unwrap();
        prop_assert!(alpha_eq(&p, &q), "{} vs {}", p, q);
    }

    #[test]
    fn ill_typed_terms_round_trip(seed in any::<u64>()) {
        let (_, p) = mutated_case(seed);
        prop_assert!(alpha_eq(&p, &parse_process(&p.to_string()).unwrap()));
    }

    #[test]
    fn alpha_eq_is_an_equivalence(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let q = rename_binders(&p);
        let r = canonical(&q);
        prop_assert!(alpha_eq(&p, &p));
        prop_assert!(alpha_eq(&p, &q) && alpha_eq(&q, &p));
        prop_assert!(alpha_eq(&q, &r) && alpha_eq(&p, &r));
    }

    #[test]
    fn identity_substitution_is_alpha_identity(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let sigma: Substitution = free_names(&p).into_iter().map(|n| (n.clone(), Value::Name(n))).collect();
        prop_assert!(alpha_eq(&substitute(&p, &sigma), &p));
    }

    #[test]
    fn substitution_moves_free_names(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (gamma, p) = case(seed);
        let free: Vec<Name> = free_names(&p).into_iter().collect();
        prop_assume!(!free.is_empty());
        let x = free[pick.index(free.len())].clone();
        let ty = gamma.lookup(&x).unwrap().clone();
        let image = gamma.names.iter().find(|(y, t)| **t == ty && **y != x).map(|(y, _)| Value::Name(y.clone()));
        let image = image.unwrap_or(match ty {
            BaseType::Int => Value::Int(1),
            BaseType::Bool => Value::Bool(true),
            BaseType::Named(_) => Value::Name(Name::new("fresh_target")),
        });
        let sigma: Substitution = BTreeMap::from([(x.clone(), image.clone())]);
        let mut expected = free_names(&p);
        expected.remove(&x);
        if let Value::Name(y) = &image {
            expected.insert(y.clone());
        }
        prop_assert_eq!(free_names(&substitute(&p, &sigma)), expected);
    }

    #[test]
    fn typing_is_invariant_under_alpha(seed in any::<u64>(), mutated in any::<bool>()) {
        let (gamma, p) = if mutated { mutated_case(seed) } else { case(seed) };
        let q = rename_binders(&p);
        prop_assert_eq!(typecheck_process(&gamma, &p).is_ok(), typecheck_process(&gamma, &q).is_ok());
        prop_assert_eq!(typecheck_process(&gamma, &p).is_ok(), typecheck_process(&gamma, &canonical(&p)).is_ok());
    }

    #[test]
    fn singleton_subjects_read_the_global_entry(seed in any::<u64>()) {
        let (gamma, _) = case(seed);
        for (x, b) in &gamma.names {
            let got = type_of_subject(&gamma, &[Value::Name(x.clone())]);
            match b {
                BaseType::Named(i) => prop_assert_eq!(got.unwrap(), gamma.typenames[i].capability.clone()),
                _ => prop_assert!(got.is_err()),
            }
        }
    }

    #[test]
    fn communication_is_symmetric(a in any::<u64>(), b in any::<u64>()) {
        let (_, p) = case(a);
        let (_, q) = case(b);
        let pq = tau_targets(&Process::par(p.clone(), q.clone()));
        let qp: BTreeSet<String> = Analysis::new(&Process::par(q, p))
            .tau_transitions()
            .into_iter()
            .map(|t| canonical(&swap_top(&t.target)).to_string())
            .collect();
        prop_assert_eq!(pq, qp);
    }

    #[test]
    fn transitions_respect_alpha(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let q = rename_binders(&p);
        prop_assert_eq!(tau_targets(&p), tau_targets(&q));
        let outs = |p: &Process| {
            let mut v: Vec<(Vec<Value>, usize)> = Analysis::new(p)
                .outputs()
                .into_iter()
                .map(|t| match t.label {
                    Label::Send { subject, extruded, .. } => (subject, extruded.len()),
                    _ => unreachable!("outputs only"),
                })
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(outs(&p), outs(&q));
    }

    #[test]
    fn extruded_names_are_private_and_sent(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let free = free_names(&p);
        for t in Analysis::new(&p).outputs() {
            if let Label::Send { extruded, objects, .. } = &t.label {
                for (z, _) in extruded {
                    prop_assert!(!free.contains(z));
                    prop_assert!(objects.contains(&Value::Name(z.clone())));
                }
            }
        }
    }

    #[test]
    fn deterministic_runs_stay_in_the_explored_space(seed in any::<u64>()) {
        let (_, p) = case(seed);
        let trace = run_tau(&p, RunStrategy::Deterministic, 6, 0);
        let explored = explore_tau(&p, 6, DEFAULT_FRONTIER_CAP).unwrap();
        let end = canonical(trace.last_state(&p));
        prop_assert!(explored.states.contains(&end));
    }

    #[test]
    fn evaluation_is_total_and_deterministic_on_sorted_terms(e in closed_expr(BaseType::Int, 3), b in closed_expr(BaseType::Bool, 3)) {
        let v = eval_expr(&e).unwrap();
        prop_assert!(matches!(v, Value::Int(_)));
        prop_assert_eq!(eval_expr(&e).unwrap(), v);
        prop_assert!(matches!(eval_expr(&b).unwrap(), Value::Bool(_)));
    }

    #[test]
    fn object_check_is_what_the_mutation_removes(seed in any::<u64>()) {
        let (gamma, p) = mutated_case(seed);
        let lax = TypingOptions { check_output_objects: false };
        prop_assert!(typecheck_process_with(&gamma, &p, lax).is_ok());
    }
}
