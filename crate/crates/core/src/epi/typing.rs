//! Typing of values, subject vectors, expressions, processes and labels.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::ops::Operator;
use super::syntax::{Expr, Label, Name, Process, Value};
use super::types::{BaseType, Capability, TreeType, TypeEnv, TypeName};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubjectError {
    #[error("empty subject vector")]
    Empty,
    #[error("subject element {position} is the value {value}, not a name")]
    NotAName { position: usize, value: Value },
    #[error("name {0} is unbound")]
    Unbound(Name),
    #[error("subject name {name} has type {ty}, which is not a type name")]
    NotTypeName { name: Name, ty: BaseType },
    #[error("type {ty} of {name} cannot appear at position {position} of this subject")]
    NotComposable { name: Name, ty: TypeName, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("name {0} is unbound")]
    Unbound(Name),
    #[error("operator {op} expects {expected} arguments, got {found}")]
    Arity { op: Operator, expected: usize, found: usize },
    #[error("argument {position} of {op} has type {found}, expected {expected}")]
    Mismatch {
        op: Operator,
        position: usize,
        expected: BaseType,
        found: BaseType,
    },
    #[error("operands of = have different types {left} and {right}")]
    EqMismatch { left: BaseType, right: BaseType },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    Subject(SubjectError),
    NotChannel,
    Arity { expected: usize, found: usize },
    Object { position: usize, error: ExprError },
    ObjectMismatch { position: usize, expected: BaseType, found: BaseType },
    Guard(ExprError),
    GuardNotBool(BaseType),
    UnknownType(TypeName),
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::Subject(e) => write!(f, "{e}"),
            TypeErrorKind::NotChannel => f.write_str("subject has capability none, not ch(...)"),
            TypeErrorKind::Arity { expected, found } => {
                write!(f, "channel carries {expected} values but {found} are used")
            }
            TypeErrorKind::Object { position, error } => write!(f, "object {position}: {error}"),
            TypeErrorKind::ObjectMismatch { position, expected, found } => {
                write!(f, "object {position} has type {found}, channel expects {expected}")
            }
            TypeErrorKind::Guard(e) => write!(f, "guard: {e}"),
            TypeErrorKind::GuardNotBool(t) => write!(f, "guard has type {t}, expected bool"),
            TypeErrorKind::UnknownType(i) => write!(f, "type {i} has no entry in the environment"),
        }
    }
}

/// A failed judgement: the rule that could not be applied and where.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule} at {path}: {kind}")]
pub struct TypeError {
    pub rule: &'static str,
    pub path: String,
    pub kind: TypeErrorKind,
}

/// Switches for mutation testing of the harness; the default is the real
/// type system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypingOptions {
    pub check_output_objects: bool,
}

impl Default for TypingOptions {
    fn default() -> Self {
        TypingOptions {
            check_output_objects: true,
        }
    }
}

pub fn type_of_value(gamma: &TypeEnv, v: &Value) -> Result<BaseType, ExprError> {
    match v {
        Value::Int(_) => Ok(BaseType::Int),
        Value::Bool(_) => Ok(BaseType::Bool),
        Value::Name(n) => gamma.lookup(n).cloned().ok_or_else(|| ExprError::Unbound(n.clone())),
    }
}

/// Walks the subject left to right, looking each name up in the global
/// environment and its type name up in the current local environment.
pub fn type_of_subject(gamma: &TypeEnv, subject: &[Value]) -> Result<Capability, SubjectError> {
    let mut cursor: &BTreeMap<TypeName, TreeType> = &gamma.typenames;
    let last = subject.len().checked_sub(1).ok_or(SubjectError::Empty)?;
    for (position, v) in subject.iter().enumerate() {
        let name = v.as_name().ok_or_else(|| SubjectError::NotAName {
            position,
            value: v.clone(),
        })?;
        let ty = match gamma.lookup(name) {
            None => return Err(SubjectError::Unbound(name.clone())),
            Some(BaseType::Named(i)) => i,
            Some(other) => {
                return Err(SubjectError::NotTypeName {
                    name: name.clone(),
                    ty: other.clone(),
                })
            }
        };
        let tree = cursor.get(ty).ok_or_else(|| SubjectError::NotComposable {
            name: name.clone(),
            ty: ty.clone(),
            position,
        })?;
        if position == last {
            return Ok(tree.capability.clone());
        }
        cursor = &tree.local;
    }
    unreachable!("loop returns at the last position")
}

pub fn typecheck_expr(gamma: &TypeEnv, e: &Expr) -> Result<BaseType, ExprError> {
    crate::grow(|| match e {
        Expr::Val(v) => type_of_value(gamma, v),
        Expr::Op(op, args) => {
            if args.len() != op.arity() {
                return Err(ExprError::Arity {
                    op: *op,
                    expected: op.arity(),
                    found: args.len(),
                });
            }
            let types = args
                .iter()
                .map(|a| typecheck_expr(gamma, a))
                .collect::<Result<Vec<_>, _>>()?;
            match op.signature() {
                Some((expected, result)) => {
                    for (position, (want, got)) in expected.iter().zip(&types).enumerate() {
                        if want != got {
                            return Err(ExprError::Mismatch {
                                op: *op,
                                position,
                                expected: want.clone(),
                                found: got.clone(),
                            });
                        }
                    }
                    Ok(result)
                }
                None => {
                    if types[0] != types[1] {
                        return Err(ExprError::EqMismatch {
                            left: types[0].clone(),
                            right: types[1].clone(),
                        });
                    }
                    Ok(op.result_sort())
                }
            }
        }
    })
}

/// The carried types of a subject, or why it is not a channel.
pub(crate) fn channel_of(gamma: &TypeEnv, subject: &[Value]) -> Result<Vec<BaseType>, TypeErrorKind> {
    match type_of_subject(gamma, subject) {
        Ok(Capability::Chan(ts)) => Ok(ts),
        Ok(Capability::NoChan) => Err(TypeErrorKind::NotChannel),
        Err(e) => Err(TypeErrorKind::Subject(e)),
    }
}

/// Checks objects pointwise against the carried types, arity included.
pub(crate) fn check_objects(gamma: &TypeEnv, carried: &[BaseType], objects: &[Expr]) -> Result<(), TypeErrorKind> {
    if carried.len() != objects.len() {
        return Err(TypeErrorKind::Arity {
            expected: carried.len(),
            found: objects.len(),
        });
    }
    for (position, (want, o)) in carried.iter().zip(objects).enumerate() {
        match typecheck_expr(gamma, o) {
            Err(error) => return Err(TypeErrorKind::Object { position, error }),
            Ok(got) if &got != want => {
                return Err(TypeErrorKind::ObjectMismatch {
                    position,
                    expected: want.clone(),
                    found: got,
                })
            }
            Ok(_) => {}
        }
    }
    Ok(())
}

pub(crate) fn known_type(gamma: &TypeEnv, b: &BaseType) -> Result<(), TypeErrorKind> {
    match b {
        BaseType::Named(i) if !gamma.typenames.contains_key(i) => Err(TypeErrorKind::UnknownType(i.clone())),
        _ => Ok(()),
    }
}

/// A type environment that can be extended and rolled back in place.
pub(crate) struct ScopedEnv {
    pub env: TypeEnv,
    undo: Vec<(Name, Option<BaseType>)>,
}

impl ScopedEnv {
    pub fn new(gamma: &TypeEnv) -> Self {
        ScopedEnv {
            env: gamma.clone(),
            undo: Vec::new(),
        }
    }

    pub fn mark(&self) -> usize {
        self.undo.len()
    }

    pub fn bind(&mut self, n: &Name, t: &BaseType) {
        let old = self.env.names.insert(n.clone(), t.clone());
        self.undo.push((n.clone(), old));
    }

    pub fn reset(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (n, old) = self.undo.pop().expect("non-empty");
            match old {
                Some(t) => self.env.names.insert(n, t),
                None => self.env.names.remove(&n),
            };
        }
    }
}

struct Checker {
    scope: ScopedEnv,
    path: Vec<String>,
    options: TypingOptions,
}

impl Checker {
    fn fail(&self, rule: &'static str, kind: TypeErrorKind) -> TypeError {
        TypeError {
            rule,
            path: render_path(&self.path),
            kind,
        }
    }

    fn nested(&mut self, step: impl Into<String>, p: &Process) -> Result<(), TypeError> {
        self.path.push(step.into());
        let r = self.check(p);
        self.path.pop();
        r
    }

    fn check(&mut self, p: &Process) -> Result<(), TypeError> {
        crate::grow(|| match p {
            Process::Nil => Ok(()),
            Process::Input { subject, binders, body } => {
                let carried = channel_of(&self.scope.env, subject).map_err(|k| self.fail("t-in", k))?;
                if carried.len() != binders.len() {
                    return Err(self.fail(
                        "t-in",
                        TypeErrorKind::Arity {
                            expected: carried.len(),
                            found: binders.len(),
                        },
                    ));
                }
                let mark = self.scope.mark();
                for (b, t) in binders.iter().zip(&carried) {
                    self.scope.bind(b, t);
                }
                let r = self.nested("in", body);
                self.scope.reset(mark);
                r
            }
            Process::Output { subject, objects, body } => {
                let carried = channel_of(&self.scope.env, subject).map_err(|k| self.fail("t-out", k))?;
                if self.options.check_output_objects {
                    check_objects(&self.scope.env, &carried, objects).map_err(|k| self.fail("t-out", k))?;
                }
                self.nested("out", body)
            }
            Process::Par(l, r) => {
                self.nested("par.0", l)?;
                self.nested("par.1", r)
            }
            Process::Restrict { bindings, body } => {
                for (_, t) in bindings {
                    known_type(&self.scope.env, t).map_err(|k| self.fail("t-res", k))?;
                }
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
                        Err(e) => return Err(self.fail("t-sum", TypeErrorKind::Guard(e))),
                        Ok(BaseType::Bool) => {}
                        Ok(t) => return Err(self.fail("t-sum", TypeErrorKind::GuardNotBool(t))),
                    }
                    self.nested(format!("sum.{i}"), b)?;
                }
                Ok(())
            }
        })
    }
}

pub(crate) fn render_path(path: &[String]) -> String {
    if path.is_empty() {
        "top".to_string()
    } else {
        path.join("/")
    }
}

pub fn typecheck_process(gamma: &TypeEnv, p: &Process) -> Result<(), TypeError> {
    typecheck_process_with(gamma, p, TypingOptions::default())
}

pub fn typecheck_process_with(gamma: &TypeEnv, p: &Process, options: TypingOptions) -> Result<(), TypeError> {
    Checker {
        scope: ScopedEnv::new(gamma),
        path: Vec::new(),
        options,
    }
    .check(p)
}

pub fn typecheck_label(gamma: &TypeEnv, label: &Label) -> Result<(), TypeError> {
    let fail = |rule, kind| TypeError {
        rule,
        path: "label".to_string(),
        kind,
    };
    match label {
        Label::Tau => Ok(()),
        Label::Recv { subject, objects } => {
            let carried = channel_of(gamma, subject).map_err(|k| fail("t-rcv", k))?;
            let objects: Vec<Expr> = objects.iter().cloned().map(Expr::Val).collect();
            check_objects(gamma, &carried, &objects).map_err(|k| fail("t-rcv", k))
        }
        Label::Send {
            subject,
            extruded,
            objects,
        } => {
            let carried = channel_of(gamma, subject).map_err(|k| fail("t-snd", k))?;
            for (_, t) in extruded {
                known_type(gamma, t).map_err(|k| fail("t-snd", k))?;
            }
            let extended = gamma.extended(extruded.iter().map(|(n, t)| (n, t)));
            let objects: Vec<Expr> = objects.iter().cloned().map(Expr::Val).collect();
            check_objects(&extended, &carried, &objects).map_err(|k| fail("t-snd", k))
        }
    }
}
