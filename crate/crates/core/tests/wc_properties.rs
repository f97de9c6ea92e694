use std::fs;
use std::path::PathBuf;

use epic_core::epi::{BaseType, Name, Value};
use epic_core::harness::{statement_expressions, WcGenerator};
use epic_core::wc::env::{this_name, Env};
use epic_core::wc::{
    build_environments, eval_wc_expr, exec, parse_program, print_program, run_program, typecheck_program,
    typecheck_wc_envs, typecheck_wc_expr, typecheck_wc_stm, EnvS, EnvV, WcProgram, WcStm, WcType, WcTypeEnv,
    DEFAULT_FUEL,
};
use proptest::prelude::*;

fn corpus(dir: &str) -> Vec<(String, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/wc").join(dir);
    let mut out: Vec<(String, String)> = fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "wc"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn program(seed: u64) -> WcProgram {
    WcGenerator::new(seed).program()
}

/// Some value of type `b`, with class names drawn from `p`.
fn value_of(p: &WcProgram, b: &BaseType, k: i64) -> Value {
    match b {
        BaseType::Int => Value::Int(k),
        BaseType::Bool => Value::Bool(k % 2 == 0),
        BaseType::Named(i) => {
            let impls: Vec<&Name> = p.classes.iter().filter(|c| &c.iface == i).map(|c| &c.name).collect();
            Value::Name(impls[k.unsigned_abs() as usize % impls.len()].clone())
        }
    }
}

fn type_of_value(gamma: &WcTypeEnv, v: &Value) -> Option<BaseType> {
    match v {
        Value::Int(_) => Some(BaseType::Int),
        Value::Bool(_) => Some(BaseType::Bool),
        Value::Name(a) => gamma.names.get(a).cloned(),
    }
}

/// Every method of every class, with its parameter types.
fn methods(p: &WcProgram, gamma: &WcTypeEnv) -> Vec<(Name, Name, Vec<BaseType>)> {
    let mut out = Vec::new();
    for c in &p.classes {
        for m in &c.methods {
            if let Some(WcType::Proc(bs)) = gamma.member(&c.iface, &m.name) {
                out.push((c.name.clone(), m.name.clone(), bs.clone()));
            }
        }
    }
    out
}

#[test]
fn corpus_round_trips() {
    for dir in ["typed", "ill_typed", "diverging"] {
        for (name, src) in corpus(dir) {
            let p = parse_program(&src).unwrap_or_else(|e| panic!("{dir}/{name}: {e}"));
            assert_eq!(parse_program(&print_program(&p)).unwrap(), p, "{dir}/{name}");
        }
    }
}

#[test]
fn corpus_is_classified_by_the_checker() {
    for (name, src) in corpus("typed") {
        assert!(typecheck_program(&parse_program(&src).unwrap()).is_ok(), "{name}");
    }
    for (name, src) in corpus("ill_typed") {
        assert!(typecheck_program(&parse_program(&src).unwrap()).is_err(), "{name}");
    }
}

#[test]
fn typed_corpus_preserves_typing() {
    for (name, src) in corpus("typed") {
        let p = parse_program(&src).unwrap();
        let gamma = typecheck_program(&p).unwrap();
        let out = run_program(&p, DEFAULT_FUEL).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(out.env_v.is_empty(), "{name}");
        typecheck_wc_envs(&gamma, &out.env_t, &out.env_s, &out.env_v).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn declarations_keep_order_and_count() {
    for (name, src) in corpus("typed") {
        let p = parse_program(&src).unwrap();
        let (s, t) = build_environments(&p.classes).unwrap();
        let order: Vec<&Name> = p.classes.iter().map(|c| &c.name).collect();
        assert_eq!(s.keys().collect::<Vec<_>>(), order, "{name}");
        assert_eq!(t.keys().collect::<Vec<_>>(), order, "{name}");
        for c in &p.classes {
            assert_eq!(s.get(&c.name).unwrap().len(), c.fields.len());
            assert_eq!(t.get(&c.name).unwrap().len(), c.methods.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_programs_round_trip(seed in any::<u64>()) {
        let p = program(seed);
        prop_assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
    }

    #[test]
    fn execution_is_deterministic(seed in any::<u64>()) {
        let p = program(seed);
        prop_assert_eq!(run_program(&p, DEFAULT_FUEL).unwrap(), run_program(&p, DEFAULT_FUEL).unwrap());
    }

    #[test]
    fn runs_preserve_typing(seed in any::<u64>()) {
        let p = program(seed);
        let gamma = typecheck_program(&p).unwrap();
        let out = run_program(&p, DEFAULT_FUEL).unwrap();
        prop_assert!(out.env_v.is_empty());
        prop_assert!(typecheck_wc_envs(&gamma, &out.env_t, &out.env_s, &out.env_v).is_ok());
    }

    #[test]
    fn method_bodies_preserve_typing(seed in any::<u64>(), k in -20i64..20) {
        let p = program(seed);
        let gamma = typecheck_program(&p).unwrap();
        let (env_s, env_t) = build_environments(&p.classes).unwrap();
        for (a, m, params) in methods(&p, &gamma) {
            let body = env_t.get(&a).unwrap().get(&m).unwrap().clone();
            let mut inner = gamma.clone().with_name(this_name(), gamma.names[&a].clone());
            let mut v = EnvV::new();
            v.push_back(this_name(), Value::Name(a.clone()));
            for (j, (x, b)) in body.params.iter().zip(&params).enumerate() {
                inner.names.insert(x.clone(), b.clone());
                v.push_back(x.clone(), value_of(&p, b, k + j as i64));
            }
            let (s2, v2) = exec(&env_t, &env_s, &v, &body.body, DEFAULT_FUEL).unwrap();
            prop_assert!(typecheck_wc_envs(&inner, &env_t, &s2, &v2).is_ok(), "{}::{}", a, m);
        }
    }

    #[test]
    fn calls_leave_the_caller_frame_alone(seed in any::<u64>(), k in -20i64..20) {
        let p = program(seed);
        let gamma = typecheck_program(&p).unwrap();
        let (env_s, env_t) = build_environments(&p.classes).unwrap();
        let mut frame = EnvV::new();
        frame.push_back(Name::new("local"), Value::Int(k));
        frame.push_back(Name::new("flag"), Value::Bool(true));
        for (a, m, params) in methods(&p, &gamma) {
            let args = params
                .iter()
                .enumerate()
                .map(|(j, b)| epic_core::wc::WcExpr::Val(value_of(&p, b, k + j as i64)))
                .collect();
            let call = WcStm::Call { target: epic_core::wc::WcExpr::Val(Value::Name(a)), method: m, args };
            let (_, after) = exec(&env_t, &env_s, &frame, &call, DEFAULT_FUEL).unwrap();
            prop_assert_eq!(&after, &frame);
        }
    }

    #[test]
    fn declarations_restore_the_frame(seed in any::<u64>(), k in -20i64..20) {
        let p = program(seed);
        let (env_s, env_t) = build_environments(&p.classes).unwrap();
        let mut frame = EnvV::new();
        frame.push_back(Name::new("x"), Value::Int(k));
        let s = WcStm::var_decl("y", BaseType::Int, epic_core::wc::WcExpr::int(k + 1), p.main.clone());
        let (_, after) = exec(&env_t, &env_s, &frame, &s, DEFAULT_FUEL).unwrap();
        prop_assert_eq!(after, frame);
    }

    #[test]
    fn typed_closed_expressions_evaluate_to_their_type(seed in any::<u64>()) {
        let p = program(seed);
        let gamma = typecheck_program(&p).unwrap();
        let (env_s, _) = build_environments(&p.classes).unwrap();
        for e in statement_expressions(&p) {
            if let Ok(b) = typecheck_wc_expr(&gamma, &e) {
                let v = eval_wc_expr(&env_s, &EnvV::new(), &e);
                prop_assert!(v.is_ok(), "{:?}", e);
                prop_assert_eq!(type_of_value(&gamma, &v.unwrap()), Some(b));
            }
        }
    }

    #[test]
    fn unused_variables_do_not_change_the_verdict(seed in any::<u64>(), ty in 0u8..2) {
        let p = program(seed);
        let gamma = typecheck_program(&p).unwrap();
        let b = if ty == 0 { BaseType::Int } else { BaseType::Bool };
        let bigger = gamma.clone().with_name("unused", b);
        prop_assert!(typecheck_wc_stm(&bigger, &p.main).is_ok());
        let mut smaller = bigger.clone();
        smaller.names.remove(&Name::new("unused"));
        prop_assert!(typecheck_wc_stm(&smaller, &p.main).is_ok());
        let (env_s, env_t): (EnvS, _) = build_environments(&p.classes).unwrap();
        prop_assert!(typecheck_wc_envs(&bigger, &env_t, &env_s, &EnvV::new()).is_ok());
    }

    #[test]
    fn update_then_lookup(keys in prop::collection::vec(0u8..4, 1..8), k in 0u8..4, v in any::<i64>()) {
        let mut env: Env<Name, Value> = Env::new();
        for (i, key) in keys.iter().enumerate() {
            env.push_front(Name::new(format!("x{key}")), Value::Int(i as i64));
        }
        let key = Name::new(format!("x{k}"));
        let before = env.clone();
        let hit = env.update(&key, Value::Int(v));
        prop_assert_eq!(hit, before.contains(&key));
        if hit {
            prop_assert_eq!(env.get(&key), Some(&Value::Int(v)));
            let changed = env.iter().zip(before.iter()).filter(|(a, b)| a != b).count();
            prop_assert!(changed <= 1);
        } else {
            prop_assert_eq!(env, before);
        }
        prop_assert!(!Env::<Name, Value>::new().contains(&key));
    }
}
