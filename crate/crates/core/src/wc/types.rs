//! WC interface types: Γ construction, expression and statement typing, and
//! agreement of runtime environments with Γ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::env::{build_environments, this_name, EnvS, EnvT, EnvV};
use super::syntax::{WcExpr, WcProgram, WcStm};
use crate::epi::{BaseType, Name, Operator, TypeName, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WcType {
    Base(BaseType),
    Proc(Vec<BaseType>),
    Iface(BTreeMap<Name, WcType>),
}

impl fmt::Display for WcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WcType::Base(b) => write!(f, "{b}"),
            WcType::Proc(bs) => {
                let bs: Vec<String> = bs.iter().map(|b| b.to_string()).collect();
                write!(f, "proc({})", bs.join(", "))
            }
            WcType::Iface(members) => {
                let ms: Vec<String> = members.iter().map(|(m, t)| format!("{m} : {t}")).collect();
                write!(f, "{{ {} }}", ms.join("; "))
            }
        }
    }
}

/// Γ on the WC side. Class names, variables and `this` map to base types;
/// interface names map to their member signatures. `classes` records which
/// of the names are class names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WcTypeEnv {
    pub names: BTreeMap<Name, BaseType>,
    pub interfaces: BTreeMap<TypeName, BTreeMap<Name, WcType>>,
    pub classes: BTreeSet<Name>,
}

impl WcTypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_name(mut self, x: impl Into<Name>, b: BaseType) -> Self {
        self.names.insert(x.into(), b);
        self
    }

    pub fn member(&self, i: &TypeName, m: &Name) -> Option<&WcType> {
        self.interfaces.get(i).and_then(|ms| ms.get(m))
    }

    /// Variables (including `this`) bound in Γ, with their types.
    pub fn variables(&self) -> impl Iterator<Item = (&Name, &BaseType)> {
        self.names.iter().filter(|(x, _)| !self.classes.contains(*x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WcTypeErrorKind {
    Unbound(Name),
    UnknownInterface(TypeName),
    NotAnInterface(BaseType),
    NoMember { iface: TypeName, member: Name },
    NotAField { iface: TypeName, member: Name },
    NotAMethod { iface: TypeName, member: Name },
    Mismatch { expected: BaseType, found: BaseType },
    OperatorArity { op: Operator, expected: usize, found: usize },
    EqMismatch { left: BaseType, right: BaseType },
    Arity { expected: usize, found: usize },
    Duplicate(String),
}

impl fmt::Display for WcTypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WcTypeErrorKind::Unbound(x) => write!(f, "{x} is not in the type environment"),
            WcTypeErrorKind::UnknownInterface(i) => write!(f, "interface {i} is not declared"),
            WcTypeErrorKind::NotAnInterface(b) => write!(f, "type {b} is not an interface"),
            WcTypeErrorKind::NoMember { iface, member } => write!(f, "interface {iface} has no member {member}"),
            WcTypeErrorKind::NotAField { iface, member } => write!(f, "{member} is a method of {iface}, not a field"),
            WcTypeErrorKind::NotAMethod { iface, member } => write!(f, "{member} is a field of {iface}, not a method"),
            WcTypeErrorKind::Mismatch { expected, found } => write!(f, "expected {expected}, found {found}"),
            WcTypeErrorKind::OperatorArity { op, expected, found } => {
                write!(f, "operator {op} expects {expected} arguments, got {found}")
            }
            WcTypeErrorKind::EqMismatch { left, right } => write!(f, "operands of = have types {left} and {right}"),
            WcTypeErrorKind::Arity { expected, found } => write!(f, "expected {expected} arguments, got {found}"),
            WcTypeErrorKind::Duplicate(what) => write!(f, "{what} declared twice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule} at {path}: {kind}")]
pub struct WcTypeError {
    pub rule: &'static str,
    pub path: String,
    pub kind: WcTypeErrorKind,
}

fn err<T>(rule: &'static str, path: &str, kind: WcTypeErrorKind) -> Result<T, WcTypeError> {
    Err(WcTypeError {
        rule,
        path: if path.is_empty() { "/".to_string() } else { path.to_string() },
        kind,
    })
}

fn iface_members(program: &WcProgram) -> Result<BTreeMap<TypeName, BTreeMap<Name, WcType>>, WcTypeError> {
    let mut out = BTreeMap::new();
    for i in &program.interfaces {
        let mut members = BTreeMap::new();
        let entries = i
            .fields
            .iter()
            .map(|(p, b)| (p, WcType::Base(b.clone())))
            .chain(i.methods.iter().map(|(f, bs)| (f, WcType::Proc(bs.clone()))));
        for (m, t) in entries {
            if members.insert(m.clone(), t).is_some() {
                return err(
                    "interface",
                    i.name.as_str(),
                    WcTypeErrorKind::Duplicate(format!("member {m} of {}", i.name)),
                );
            }
        }
        if out.insert(i.name.clone(), members).is_some() {
            return err("interface", i.name.as_str(), WcTypeErrorKind::Duplicate(format!("interface {}", i.name)));
        }
    }
    Ok(out)
}

/// Γ read off the declarations without validation; later entries win.
pub fn gamma_of(program: &WcProgram) -> WcTypeEnv {
    let mut g = WcTypeEnv::new();
    for i in &program.interfaces {
        let members = g.interfaces.entry(i.name.clone()).or_default();
        for (p, b) in &i.fields {
            members.insert(p.clone(), WcType::Base(b.clone()));
        }
        for (f, bs) in &i.methods {
            members.insert(f.clone(), WcType::Proc(bs.clone()));
        }
    }
    for c in &program.classes {
        g.names.insert(c.name.clone(), BaseType::Named(c.iface.clone()));
        g.classes.insert(c.name.clone());
    }
    g
}

/// Γ for a program: every interface with its members, and every class with
/// its interface. Member types must mention declared interfaces only.
pub fn build_gamma(program: &WcProgram) -> Result<WcTypeEnv, WcTypeError> {
    let interfaces = iface_members(program)?;
    let known = |b: &BaseType, path: &str| match b {
        BaseType::Named(i) if !interfaces.contains_key(i) => {
            err("interface", path, WcTypeErrorKind::UnknownInterface(i.clone()))
        }
        _ => Ok(()),
    };
    for (i, members) in &interfaces {
        for (m, t) in members {
            let path = format!("{i}.{m}");
            match t {
                WcType::Base(b) => known(b, &path)?,
                WcType::Proc(bs) => bs.iter().try_for_each(|b| known(b, &path))?,
                WcType::Iface(_) => {}
            }
        }
    }
    let mut names = BTreeMap::new();
    for c in &program.classes {
        if !interfaces.contains_key(&c.iface) {
            return err("class", c.name.as_str(), WcTypeErrorKind::UnknownInterface(c.iface.clone()));
        }
        if names.insert(c.name.clone(), BaseType::Named(c.iface.clone())).is_some() {
            return err("class", c.name.as_str(), WcTypeErrorKind::Duplicate(format!("class {}", c.name)));
        }
    }
    let classes = names.keys().cloned().collect();
    Ok(WcTypeEnv {
        names,
        interfaces,
        classes,
    })
}

fn type_of_value(gamma: &WcTypeEnv, v: &Value, path: &str) -> Result<BaseType, WcTypeError> {
    match v {
        Value::Int(_) => Ok(BaseType::Int),
        Value::Bool(_) => Ok(BaseType::Bool),
        Value::Name(a) => match gamma.names.get(a) {
            Some(b) => Ok(b.clone()),
            None => err("t-val", path, WcTypeErrorKind::Unbound(a.clone())),
        },
    }
}

fn lookup(gamma: &WcTypeEnv, rule: &'static str, x: &Name, path: &str) -> Result<BaseType, WcTypeError> {
    match gamma.names.get(x) {
        Some(b) => Ok(b.clone()),
        None => err(rule, path, WcTypeErrorKind::Unbound(x.clone())),
    }
}

fn member_of<'g>(
    gamma: &'g WcTypeEnv,
    rule: &'static str,
    base: &BaseType,
    m: &Name,
    path: &str,
) -> Result<(TypeName, &'g WcType), WcTypeError> {
    let BaseType::Named(i) = base else {
        return err(rule, path, WcTypeErrorKind::NotAnInterface(base.clone()));
    };
    let Some(members) = gamma.interfaces.get(i) else {
        return err(rule, path, WcTypeErrorKind::UnknownInterface(i.clone()));
    };
    match members.get(m) {
        Some(t) => Ok((i.clone(), t)),
        None => err(
            rule,
            path,
            WcTypeErrorKind::NoMember {
                iface: i.clone(),
                member: m.clone(),
            },
        ),
    }
}

fn field_type(gamma: &WcTypeEnv, rule: &'static str, base: &BaseType, p: &Name, path: &str) -> Result<BaseType, WcTypeError> {
    match member_of(gamma, rule, base, p, path)? {
        (_, WcType::Base(b)) => Ok(b.clone()),
        (iface, _) => err(
            rule,
            path,
            WcTypeErrorKind::NotAField {
                iface,
                member: p.clone(),
            },
        ),
    }
}

fn typecheck_expr_at(gamma: &WcTypeEnv, e: &WcExpr, path: &str) -> Result<BaseType, WcTypeError> {
    crate::grow(|| match e {
        WcExpr::Val(v) => type_of_value(gamma, v, path),
        WcExpr::Var(x) => lookup(gamma, "t-var", x, path),
        WcExpr::This => lookup(gamma, "t-var", &this_name(), path),
        WcExpr::Field(base, p) => {
            let b = typecheck_expr_at(gamma, base, path)?;
            field_type(gamma, "t-field", &b, p, path)
        }
        WcExpr::Op(op, args) => {
            if args.len() != op.arity() {
                return err(
                    "t-op",
                    path,
                    WcTypeErrorKind::OperatorArity {
                        op: *op,
                        expected: op.arity(),
                        found: args.len(),
                    },
                );
            }
            let ts = args
                .iter()
                .map(|a| typecheck_expr_at(gamma, a, path))
                .collect::<Result<Vec<_>, _>>()?;
            match op.signature() {
                Some((want, result)) => {
                    for (w, t) in want.iter().zip(&ts) {
                        if w != t {
                            return err(
                                "t-op",
                                path,
                                WcTypeErrorKind::Mismatch {
                                    expected: w.clone(),
                                    found: t.clone(),
                                },
                            );
                        }
                    }
                    Ok(result)
                }
                None if ts[0] == ts[1] => Ok(op.result_sort()),
                None => err(
                    "t-op",
                    path,
                    WcTypeErrorKind::EqMismatch {
                        left: ts[0].clone(),
                        right: ts[1].clone(),
                    },
                ),
            }
        }
    })
}

pub fn typecheck_wc_expr(gamma: &WcTypeEnv, e: &WcExpr) -> Result<BaseType, WcTypeError> {
    typecheck_expr_at(gamma, e, "")
}

fn expect(gamma: &WcTypeEnv, rule: &'static str, e: &WcExpr, want: &BaseType, path: &str) -> Result<(), WcTypeError> {
    let got = typecheck_expr_at(gamma, e, path)?;
    if &got != want {
        return err(
            rule,
            path,
            WcTypeErrorKind::Mismatch {
                expected: want.clone(),
                found: got,
            },
        );
    }
    Ok(())
}

fn join(path: &str, step: &str) -> String {
    format!("{path}/{step}")
}

fn typecheck_stm_at(gamma: &WcTypeEnv, s: &WcStm, path: &str) -> Result<(), WcTypeError> {
    crate::grow(|| match s {
        WcStm::Skip => Ok(()),
        WcStm::VarDecl { var, ty, init, body } => {
            if let BaseType::Named(i) = ty {
                if !gamma.interfaces.contains_key(i) {
                    return err("t-decv", path, WcTypeErrorKind::UnknownInterface(i.clone()));
                }
            }
            expect(gamma, "t-decv", init, ty, path)?;
            let inner = gamma.clone().with_name(var.clone(), ty.clone());
            typecheck_stm_at(&inner, body, &join(path, &format!("var {var}")))
        }
        WcStm::AssignVar(x, e) => {
            let b = lookup(gamma, "t-assv", x, path)?;
            expect(gamma, "t-assv", e, &b, path)
        }
        WcStm::AssignField(p, e) => {
            let this = lookup(gamma, "t-assf", &this_name(), path)?;
            let b = field_type(gamma, "t-assf", &this, p, path)?;
            expect(gamma, "t-assf", e, &b, path)
        }
        WcStm::Seq(a, b) => {
            typecheck_stm_at(gamma, a, &join(path, "seq.0"))?;
            typecheck_stm_at(gamma, b, &join(path, "seq.1"))
        }
        WcStm::If(c, t, e) => {
            expect(gamma, "t-if", c, &BaseType::Bool, path)?;
            typecheck_stm_at(gamma, t, &join(path, "then"))?;
            typecheck_stm_at(gamma, e, &join(path, "else"))
        }
        WcStm::While(c, body) => {
            expect(gamma, "t-while", c, &BaseType::Bool, path)?;
            typecheck_stm_at(gamma, body, &join(path, "do"))
        }
        WcStm::Call { target, method, args } => {
            let t = typecheck_expr_at(gamma, target, path)?;
            let params = match member_of(gamma, "t-call", &t, method, path)? {
                (_, WcType::Proc(bs)) => bs.clone(),
                (iface, _) => {
                    return err(
                        "t-call",
                        path,
                        WcTypeErrorKind::NotAMethod {
                            iface,
                            member: method.clone(),
                        },
                    )
                }
            };
            if params.len() != args.len() {
                return err(
                    "t-call",
                    path,
                    WcTypeErrorKind::Arity {
                        expected: params.len(),
                        found: args.len(),
                    },
                );
            }
            for (b, e) in params.iter().zip(args) {
                expect(gamma, "t-call", e, b, path)?;
            }
            Ok(())
        }
    })
}

pub fn typecheck_wc_stm(gamma: &WcTypeEnv, s: &WcStm) -> Result<(), WcTypeError> {
    typecheck_stm_at(gamma, s, "")
}

fn class_iface(gamma: &WcTypeEnv, rule: &'static str, a: &Name, path: &str) -> Result<TypeName, WcTypeError> {
    match lookup(gamma, rule, a, path)? {
        BaseType::Named(i) => Ok(i),
        other => err(rule, path, WcTypeErrorKind::NotAnInterface(other)),
    }
}

/// Agreement of `envT`, `envS` and `envV` with Γ. Method bodies are checked
/// with `this` bound to the class interface and the parameters bound to the
/// signature.
pub fn typecheck_wc_envs(gamma: &WcTypeEnv, env_t: &EnvT, env_s: &EnvS, env_v: &EnvV) -> Result<(), WcTypeError> {
    for (a, env_m) in env_t.iter() {
        let i = class_iface(gamma, "t-env_T", a, a.as_str())?;
        for (f, m) in env_m.iter() {
            let path = format!("{a}::{f}");
            let params = match member_of(gamma, "t-env_M", &BaseType::Named(i.clone()), f, &path)? {
                (_, WcType::Proc(bs)) => bs.clone(),
                (iface, _) => {
                    return err(
                        "t-env_M",
                        &path,
                        WcTypeErrorKind::NotAMethod {
                            iface,
                            member: f.clone(),
                        },
                    )
                }
            };
            if params.len() != m.params.len() {
                return err(
                    "t-env_M",
                    &path,
                    WcTypeErrorKind::Arity {
                        expected: params.len(),
                        found: m.params.len(),
                    },
                );
            }
            let mut inner = gamma.clone().with_name(this_name(), BaseType::Named(i.clone()));
            for (x, b) in m.params.iter().zip(&params) {
                inner.names.insert(x.clone(), b.clone());
            }
            typecheck_stm_at(&inner, &m.body, &path)?;
        }
    }
    for (a, env_f) in env_s.iter() {
        let i = class_iface(gamma, "t-env_S", a, a.as_str())?;
        for (p, v) in env_f.iter() {
            let path = format!("{a}.{p}");
            let b = field_type(gamma, "t-env_F", &BaseType::Named(i.clone()), p, &path)?;
            let got = type_of_value(gamma, v, &path)?;
            if got != b {
                return err("t-env_F", &path, WcTypeErrorKind::Mismatch { expected: b, found: got });
            }
        }
    }
    for (x, v) in env_v.iter() {
        let path = x.as_str();
        let b = lookup(gamma, "t-env_V", x, path)?;
        let got = type_of_value(gamma, v, path)?;
        if got != b {
            return err("t-env_V", path, WcTypeErrorKind::Mismatch { expected: b, found: got });
        }
    }
    Ok(())
}

/// Checks a whole program: Γ, the declaration environments, and `main`
/// under an empty `envV`. Returns Γ on success.
pub fn typecheck_program(program: &WcProgram) -> Result<WcTypeEnv, WcTypeError> {
    let gamma = build_gamma(program)?;
    let (env_s, env_t) = build_environments(&program.classes).or_else(|e| err("class", "/", WcTypeErrorKind::Duplicate(e.to_string())))?;
    typecheck_wc_envs(&gamma, &env_t, &env_s, &EnvV::new())?;
    typecheck_wc_stm(&gamma, &program.main)?;
    Ok(gamma)
}
