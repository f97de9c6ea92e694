//! Big-step evaluation of WC expressions and statements.

use thiserror::Error;

use super::env::{build_environments, this_name, DeclError, EnvS, EnvT, EnvV};
use super::syntax::{WcExpr, WcProgram, WcStm};
use crate::epi::{EvalError, Name, Value};

/// Rule applications allowed per run before giving up.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WcEvalError {
    #[error("variable {0} is unbound")]
    UnboundVar(Name),
    #[error("class {0} is not declared")]
    UnknownClass(Name),
    #[error("class {class} has no field {field}")]
    UnknownField { class: Name, field: Name },
    #[error("{0} is not a class name")]
    NotAClass(Value),
    #[error(transparent)]
    Op(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("stuck in {rule}: {reason}")]
    Stuck { rule: &'static str, reason: String },
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error(transparent)]
    Decl(#[from] DeclError),
}

fn class_of(v: Value) -> Result<Name, WcEvalError> {
    match v {
        Value::Name(a) => Ok(a),
        other => Err(WcEvalError::NotAClass(other)),
    }
}

pub fn eval_wc_expr(env_s: &EnvS, env_v: &EnvV, e: &WcExpr) -> Result<Value, WcEvalError> {
    crate::grow(|| match e {
        WcExpr::Val(v) => Ok(v.clone()),
        WcExpr::Var(x) => env_v.get(x).cloned().ok_or_else(|| WcEvalError::UnboundVar(x.clone())),
        WcExpr::This => env_v
            .get(&this_name())
            .cloned()
            .ok_or_else(|| WcEvalError::UnboundVar(this_name())),
        WcExpr::Field(base, p) => {
            let a = class_of(eval_wc_expr(env_s, env_v, base)?)?;
            let fields = env_s.get(&a).ok_or_else(|| WcEvalError::UnknownClass(a.clone()))?;
            fields.get(p).cloned().ok_or_else(|| WcEvalError::UnknownField {
                class: a.clone(),
                field: p.clone(),
            })
        }
        WcExpr::Op(op, args) => {
            let vals = args
                .iter()
                .map(|a| eval_wc_expr(env_s, env_v, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(op.apply(&vals)?)
        }
    })
}

struct Machine<'a> {
    env_t: &'a EnvT,
    env_s: EnvS,
    fuel: u64,
}

fn stuck<T>(rule: &'static str, reason: impl Into<String>) -> Result<T, ExecError> {
    Err(ExecError::Stuck {
        rule,
        reason: reason.into(),
    })
}

impl Machine<'_> {
    fn tick(&mut self) -> Result<(), ExecError> {
        if self.fuel == 0 {
            return Err(ExecError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn eval(&self, rule: &'static str, env_v: &EnvV, e: &WcExpr) -> Result<Value, ExecError> {
        eval_wc_expr(&self.env_s, env_v, e).or_else(|err| stuck(rule, err.to_string()))
    }

    fn guard(&self, rule: &'static str, env_v: &EnvV, e: &WcExpr) -> Result<bool, ExecError> {
        match self.eval(rule, env_v, e)? {
            Value::Bool(b) => Ok(b),
            other => stuck(rule, format!("guard evaluated to {other}, not a boolean")),
        }
    }

    fn exec(&mut self, env_v: &mut EnvV, s: &WcStm) -> Result<(), ExecError> {
        crate::grow(|| {
            self.tick()?;
            match s {
                WcStm::Skip => Ok(()),
                WcStm::Seq(a, b) => {
                    self.exec(env_v, a)?;
                    self.exec(env_v, b)
                }
                WcStm::If(c, t, e) => {
                    if self.guard("wc-if", env_v, c)? {
                        self.exec(env_v, t)
                    } else {
                        self.exec(env_v, e)
                    }
                }
                WcStm::While(c, body) => {
                    while self.guard("wc-while", env_v, c)? {
                        self.exec(env_v, body)?;
                        self.tick()?;
                    }
                    Ok(())
                }
                WcStm::VarDecl { var, init, body, .. } => {
                    if env_v.contains(var) {
                        return stuck("wc-decv", format!("variable {var} is already bound"));
                    }
                    let v = self.eval("wc-decv", env_v, init)?;
                    env_v.push_front(var.clone(), v);
                    let r = self.exec(env_v, body);
                    env_v.pop_front();
                    r
                }
                WcStm::AssignVar(x, e) => {
                    if !env_v.contains(x) {
                        return stuck("wc-assv", format!("variable {x} is unbound"));
                    }
                    let v = self.eval("wc-assv", env_v, e)?;
                    env_v.update(x, v);
                    Ok(())
                }
                WcStm::AssignField(p, e) => {
                    let v = self.eval("wc-assf", env_v, e)?;
                    let a = match env_v.get(&this_name()) {
                        Some(Value::Name(a)) => a.clone(),
                        Some(other) => return stuck("wc-assf", format!("this is {other}, not a class")),
                        None => return stuck("wc-assf", "this is unbound"),
                    };
                    let Some(fields) = self.env_s.get_mut(&a) else {
                        return stuck("wc-assf", format!("class {a} is not declared"));
                    };
                    if !fields.update(p, v) {
                        return stuck("wc-assf", format!("class {a} has no field {p}"));
                    }
                    Ok(())
                }
                WcStm::Call { target, method, args } => {
                    let a = match self.eval("wc-call", env_v, target)? {
                        Value::Name(a) => a,
                        other => return stuck("wc-call", format!("call target {other} is not a class")),
                    };
                    let env_t = self.env_t;
                    let Some(methods) = env_t.get(&a) else {
                        return stuck("wc-call", format!("class {a} is not declared"));
                    };
                    let Some(m) = methods.get(method) else {
                        return stuck("wc-call", format!("class {a} has no method {method}"));
                    };
                    let vals = args
                        .iter()
                        .map(|e| self.eval("wc-call", env_v, e))
                        .collect::<Result<Vec<_>, _>>()?;
                    if vals.len() != m.params.len() {
                        return stuck(
                            "wc-call",
                            format!("{a}::{method} takes {} arguments, got {}", m.params.len(), vals.len()),
                        );
                    }
                    let mut callee = EnvV::new();
                    callee.push_back(this_name(), Value::Name(a.clone()));
                    for (x, v) in m.params.iter().zip(vals) {
                        callee.push_back(x.clone(), v);
                    }
                    self.exec(&mut callee, &m.body)
                }
            }
        })
    }
}

/// Runs `s` from the given state; returns the final `envS` and `envV`.
pub fn exec(env_t: &EnvT, env_s: &EnvS, env_v: &EnvV, s: &WcStm, fuel: u64) -> Result<(EnvS, EnvV), ExecError> {
    let mut m = Machine {
        env_t,
        env_s: env_s.clone(),
        fuel,
    };
    let mut v = env_v.clone();
    m.exec(&mut v, s)?;
    Ok((m.env_s, v))
}

/// The final state of a whole program run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub env_t: EnvT,
    pub env_s: EnvS,
    pub env_v: EnvV,
}

impl Outcome {
    /// `(class, field, value)` triples sorted by class, then field.
    pub fn fields(&self) -> Vec<(Name, Name, Value)> {
        let mut out: Vec<(Name, Name, Value)> = self
            .env_s
            .iter()
            .flat_map(|(a, f)| f.iter().map(move |(p, v)| (a.clone(), p.clone(), v.clone())))
            .collect();
        out.sort();
        out
    }
}

/// Builds the declaration environments and runs `main` from an empty `envV`.
pub fn run_program(p: &WcProgram, fuel: u64) -> Result<Outcome, ExecError> {
    let (env_s, env_t) = build_environments(&p.classes)?;
    let (env_s, env_v) = exec(&env_t, &env_s, &EnvV::new(), &p.main, fuel)?;
    Ok(Outcome { env_t, env_s, env_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::Operator;
    use crate::wc::parse::{parse_program, parse_stm};

    const INC: &str = "
        interface IA { field p : int; method inc : proc(); }
        class A : IA { field p := 0; method inc() { this.p := this.p + 1 } }
        main { A::inc(); A::inc() }
    ";

    fn env_v(bindings: &[(&str, Value)]) -> EnvV {
        let mut v = EnvV::new();
        for (k, x) in bindings {
            v.push_back(Name::new(k), x.clone());
        }
        v
    }

    #[test]
    fn expressions() {
        let s = EnvS::new();
        assert_eq!(eval_wc_expr(&s, &EnvV::new(), &WcExpr::int(7)), Ok(Value::Int(7)));
        let v = env_v(&[("x", Value::Int(4))]);
        assert_eq!(eval_wc_expr(&s, &v, &WcExpr::var("x")), Ok(Value::Int(4)));
        let p = parse_program(INC).unwrap();
        let (s, _) = build_environments(&p.classes).unwrap();
        let e = WcExpr::field(WcExpr::class("A"), "p");
        assert_eq!(eval_wc_expr(&s, &EnvV::new(), &e), Ok(Value::Int(0)));
        let e = WcExpr::field(WcExpr::int(3), "p");
        assert!(matches!(eval_wc_expr(&s, &EnvV::new(), &e), Err(WcEvalError::NotAClass(_))));
        let e = WcExpr::op(Operator::Add, vec![WcExpr::int(1), WcExpr::bool(true)]);
        assert!(matches!(eval_wc_expr(&s, &EnvV::new(), &e), Err(WcEvalError::Op(_))));
    }

    #[test]
    fn skip_and_false_loop_leave_state_unchanged() {
        let t = EnvT::new();
        let s = EnvS::new();
        let v = env_v(&[("x", Value::Int(1))]);
        assert_eq!(exec(&t, &s, &v, &WcStm::Skip, 10), Ok((s.clone(), v.clone())));
        let w = parse_stm("while false do skip", &[]).unwrap();
        assert_eq!(exec(&t, &s, &v, &w, 10), Ok((s, v)));
    }

    #[test]
    fn inc_twice() {
        let out = run_program(&parse_program(INC).unwrap(), DEFAULT_FUEL).unwrap();
        assert_eq!(out.fields(), vec![(Name::new("A"), Name::new("p"), Value::Int(2))]);
    }

    #[test]
    fn calls_restore_the_caller_variables() {
        let src = "
            interface I { method f : proc(int); }
            class A : I { method f(x) { x := x + 1 } }
            main { var int y := 5 in A::f(y) }
        ";
        let p = parse_program(src).unwrap();
        let (s, t) = build_environments(&p.classes).unwrap();
        let v = env_v(&[("y", Value::Int(5))]);
        let call = parse_stm("A::f(y)", &["A"]).unwrap();
        let (_, after) = exec(&t, &s, &v, &call, DEFAULT_FUEL).unwrap();
        assert_eq!(after, v);
    }

    #[test]
    fn loops_and_divergence() {
        let t = EnvT::new();
        let s = EnvS::new();
        let count = parse_stm("var int x := 0 in while x < 10 do x := x + 1", &[]).unwrap();
        assert!(exec(&t, &s, &EnvV::new(), &count, DEFAULT_FUEL).is_ok());
        let forever = parse_stm("while true do skip", &[]).unwrap();
        assert_eq!(exec(&t, &s, &EnvV::new(), &forever, 1000), Err(ExecError::FuelExhausted));
    }

    #[test]
    fn stuck_cases() {
        let t = EnvT::new();
        let s = EnvS::new();
        let err = exec(&t, &s, &EnvV::new(), &parse_stm("x := 1", &[]).unwrap(), 10).unwrap_err();
        assert!(matches!(err, ExecError::Stuck { rule: "wc-assv", .. }));
        let err = exec(&t, &s, &EnvV::new(), &parse_stm("if 1 then skip else skip", &[]).unwrap(), 10).unwrap_err();
        assert!(matches!(err, ExecError::Stuck { rule: "wc-if", .. }));
        let v = env_v(&[("x", Value::Int(1))]);
        let err = exec(&t, &s, &v, &parse_stm("var int x := 2 in skip", &[]).unwrap(), 10).unwrap_err();
        assert!(matches!(err, ExecError::Stuck { rule: "wc-decv", .. }));
    }

    #[test]
    fn decv_restores_the_domain() {
        let t = EnvT::new();
        let s = EnvS::new();
        let v = env_v(&[("y", Value::Int(1))]);
        let d = parse_stm("var int x := 2 in y := x", &[]).unwrap();
        let (_, after) = exec(&t, &s, &v, &d, 10).unwrap();
        assert_eq!(after.keys().collect::<Vec<_>>(), v.keys().collect::<Vec<_>>());
        assert_eq!(after.get(&Name::new("y")), Some(&Value::Int(2)));
    }
}
