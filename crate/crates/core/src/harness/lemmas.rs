//! Generated instances of the weakening, strengthening and substitution
//! lemmas.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gen::{FuzzConfig, Generator};
use crate::epi::{free_names, substitute, typecheck_process, BaseType, Name, Process, TypeEnv, Value};

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaTally {
    pub instances: usize,
    pub failures: usize,
    pub counterexamples: Vec<String>,
}

impl LemmaTally {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < 5 {
                self.counterexamples.push(describe());
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaSummary {
    pub weakening: LemmaTally,
    pub strengthening: LemmaTally,
    pub substitution: LemmaTally,
}

fn verdict(gamma: &TypeEnv, p: &Process) -> bool {
    typecheck_process(gamma, p).is_ok()
}

/// Adding a binding for a name not free in `p` preserves the verdict.
fn weakening(rng: &mut ChaCha8Rng, gamma: &TypeEnv, p: &Process, tally: &mut LemmaTally) {
    let fresh = Name::new(format!("w{}", rng.gen_range(0..1000)));
    if free_names(p).contains(&fresh) {
        return;
    }
    let mut types: Vec<BaseType> = vec![BaseType::Int, BaseType::Bool];
    types.extend(gamma.typenames.keys().cloned().map(BaseType::Named));
    let ty = types.choose(rng).expect("non-empty").clone();
    let bigger = gamma.clone().with_name(fresh.clone(), ty.clone());
    tally.record(verdict(gamma, p) == verdict(&bigger, p), || format!("adding {fresh}:{ty} changes the verdict on {p}"));
}

/// Removing bindings for names not free in `p` preserves the verdict.
fn strengthening(gamma: &TypeEnv, p: &Process, tally: &mut LemmaTally) {
    let free = free_names(p);
    let mut smaller = gamma.clone();
    smaller.names.retain(|n, _| free.contains(n));
    tally.record(verdict(gamma, p) == verdict(&smaller, p), || format!("dropping unused names changes the verdict on {p}"));
}

/// Replacing free names by values of the same type keeps `p` typeable.
fn substitution(rng: &mut ChaCha8Rng, gamma: &TypeEnv, p: &Process, tally: &mut LemmaTally) {
    let mut sigma: BTreeMap<Name, Value> = BTreeMap::new();
    for x in free_names(p) {
        let Some(ty) = gamma.lookup(&x) else { continue };
        if rng.gen_bool(0.4) {
            continue;
        }
        let mut candidates: Vec<Value> = gamma
            .names
            .iter()
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| Value::Name(n.clone()))
            .collect();
        match ty {
            BaseType::Int => candidates.push(Value::Int(rng.gen_range(-5..50))),
            BaseType::Bool => candidates.push(Value::Bool(rng.gen_bool(0.5))),
            BaseType::Named(_) => {}
        }
        sigma.insert(x, candidates.choose(rng).expect("x itself qualifies").clone());
    }
    if sigma.is_empty() {
        return;
    }
    let q = substitute(p, &sigma);
    tally.record(verdict(gamma, &q), || {
        let s: Vec<String> = sigma.iter().map(|(x, v)| format!("{x} := {v}")).collect();
        format!("{p} under [{}] gives the ill-typed {q}", s.join(", "))
    });
}

/// Runs generated instances until each lemma has at least `per_lemma`.
/// Weakening and strengthening also see ill-typed processes, produced with
/// the object check off, so both verdicts are exercised.
pub fn run_lemmas(config: FuzzConfig, per_lemma: usize) -> LemmaSummary {
    let mut typed = Generator::new(config);
    let mut mutated = Generator::mutated(FuzzConfig {
        seed: config.seed.wrapping_add(1),
        ..config
    });
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));
    let mut s = LemmaSummary::default();
    let limit = per_lemma.saturating_mul(20).max(100);
    for _ in 0..limit {
        if s.weakening.instances >= per_lemma && s.strengthening.instances >= per_lemma && s.substitution.instances >= per_lemma {
            break;
        }
        let (gamma, p) = typed.case();
        weakening(&mut rng, &gamma, &p, &mut s.weakening);
        strengthening(&gamma, &p, &mut s.strengthening);
        substitution(&mut rng, &gamma, &p, &mut s.substitution);
        let (gamma, p) = mutated.case();
        weakening(&mut rng, &gamma, &p, &mut s.weakening);
        strengthening(&gamma, &p, &mut s.strengthening);
    }
    s
}
