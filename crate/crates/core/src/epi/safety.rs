//! The error predicate and the now-safe and bounded safe checks.
//!
//! The predicate inspects only the active part of a process: it recurses
//! through parallel composition, restriction, replication and sum branches,
//! never into the continuation of a prefix.

use super::engine::{explore_tau, StateExplosion};
use super::syntax::Process;
use super::types::{BaseType, TypeEnv};
use super::typing::{channel_of, check_objects, render_path, typecheck_expr, ScopedEnv, TypeError, TypeErrorKind};

struct Finder {
    scope: ScopedEnv,
    path: Vec<String>,
}

impl Finder {
    fn fail(&self, rule: &'static str, kind: TypeErrorKind) -> Option<TypeError> {
        Some(TypeError {
            rule,
            path: render_path(&self.path),
            kind,
        })
    }

    fn nested(&mut self, step: impl Into<String>, p: &Process) -> Option<TypeError> {
        self.path.push(step.into());
        let r = self.find(p);
        self.path.pop();
        r
    }

    fn find(&mut self, p: &Process) -> Option<TypeError> {
        crate::grow(|| match p {
            Process::Nil => None,
            Process::Input { subject, binders, .. } => match channel_of(&self.scope.env, subject) {
                Err(k) => self.fail("w-in", k),
                Ok(carried) if carried.len() != binders.len() => self.fail(
                    "w-in",
                    TypeErrorKind::Arity {
                        expected: carried.len(),
                        found: binders.len(),
                    },
                ),
                Ok(_) => None,
            },
            Process::Output { subject, objects, .. } => match channel_of(&self.scope.env, subject) {
                Err(k) => self.fail("w-out", k),
                Ok(carried) => match check_objects(&self.scope.env, &carried, objects) {
                    Err(k) => self.fail("w-out", k),
                    Ok(()) => None,
                },
            },
            Process::Par(l, r) => self.nested("par.0", l).or_else(|| self.nested("par.1", r)),
            Process::Restrict { bindings, body } => {
                let mark = self.scope.mark();
                for (n, t) in bindings {
                    self.scope.bind(n, t);
                }
                let r = self.nested("new", body);
                self.scope.reset(mark);
                r
            }
            Process::Repl(body) => self.nested("!", body),
            Process::Sum(branches) => {
                for (i, (g, b)) in branches.iter().enumerate() {
                    match typecheck_expr(&self.scope.env, g) {
                        Err(e) => return self.fail("w-sum", TypeErrorKind::Guard(e)),
                        Ok(BaseType::Bool) => {}
                        Ok(t) => return self.fail("w-sum", TypeErrorKind::GuardNotBool(t)),
                    }
                    if let Some(e) = self.nested(format!("sum.{i}"), b) {
                        return Some(e);
                    }
                }
                None
            }
        })
    }
}

/// The first derivation of the error predicate found, if any.
pub fn wrong_witness(gamma: &TypeEnv, p: &Process) -> Option<TypeError> {
    Finder {
        scope: ScopedEnv::new(gamma),
        path: Vec::new(),
    }
    .find(p)
}

pub fn wrong(gamma: &TypeEnv, p: &Process) -> bool {
    wrong_witness(gamma, p).is_some()
}

pub fn now_safe(gamma: &TypeEnv, p: &Process) -> bool {
    !wrong(gamma, p)
}

/// Now-safety of every state reachable in at most `depth` τ-steps.
pub fn safe_bounded(gamma: &TypeEnv, p: &Process, depth: usize, cap: usize) -> Result<bool, StateExplosion> {
    let reachable = explore_tau(p, depth, cap)?;
    Ok(reachable.states.iter().all(|s| now_safe(gamma, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::engine::DEFAULT_FRONTIER_CAP;
    use crate::epi::parse::parse_process;
    use crate::epi::types::TreeType;

    fn int_channel() -> TypeEnv {
        TypeEnv::new()
            .with_name("x", BaseType::named("I"))
            .with_type("I", TreeType::chan(vec![BaseType::Int]))
    }

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    #[test]
    fn output_of_ill_sorted_expression_is_wrong() {
        let e = wrong_witness(&int_channel(), &p("x!(true+2).0")).unwrap();
        assert_eq!(e.rule, "w-out");
    }

    #[test]
    fn nil_is_not_wrong() {
        assert!(now_safe(&int_channel(), &Process::Nil));
    }

    #[test]
    fn input_arity_is_checked() {
        let e = wrong_witness(&int_channel(), &p("x?(a,b).0")).unwrap();
        assert_eq!(e.rule, "w-in");
    }

    #[test]
    fn continuations_are_not_inspected() {
        assert!(!wrong(&int_channel(), &p("x?(a).x!(true)")));
        assert!(wrong(&int_channel(), &p("0 | !new y:I (y!(true))")));
    }

    #[test]
    fn guards_must_be_boolean() {
        let e = wrong_witness(&int_channel(), &p("[1] 0 + [true] 0")).unwrap();
        assert_eq!(e.rule, "w-sum");
        assert!(wrong(&int_channel(), &p("[true] x!(false)")));
    }

    #[test]
    fn bounded_safety_finds_residual_error() {
        let g = int_channel();
        let src = p("x!(1).x!(true).0 | x?(y).0");
        assert!(now_safe(&g, &src));
        assert!(!safe_bounded(&g, &src, 2, DEFAULT_FRONTIER_CAP).unwrap());
        assert!(safe_bounded(&g, &src, 0, DEFAULT_FRONTIER_CAP).unwrap());
    }
}
