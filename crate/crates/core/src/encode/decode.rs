//! Reading the final field store back out of a compiled program's state.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{CompilationUnit, RET_TYPE};
use crate::epi::semantics::Analysis;
use crate::epi::{eval_expr, BaseType, Name, Process, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("the process is not quiescent")]
    NotQuiescent,
    #[error("no cell for {class}.{field}")]
    Missing { class: Name, field: Name },
    #[error("{count} cells for {class}.{field}")]
    Duplicate { class: Name, field: Name, count: usize },
    #[error("the cell for {class}.{field} is guarded by a prefix")]
    Guarded { class: Name, field: Name },
    #[error("the cell for {class}.{field} does not hold a single value")]
    Malformed { class: Name, field: Name },
}

fn prune_arc(p: &Arc<Process>) -> Arc<Process> {
    crate::grow(|| match &**p {
        Process::Par(l, r) => {
            let (l2, r2) = (prune_arc(l), prune_arc(r));
            if l2.is_nil() {
                r2
            } else if r2.is_nil() {
                l2
            } else if Arc::ptr_eq(&l2, l) && Arc::ptr_eq(&r2, r) {
                p.clone()
            } else {
                Arc::new(Process::Par(l2, r2))
            }
        }
        Process::Restrict { bindings, body } => {
            let b2 = prune_arc(body);
            if b2.is_nil() {
                b2
            } else if Arc::ptr_eq(&b2, body) {
                p.clone()
            } else {
                Arc::new(Process::Restrict {
                    bindings: bindings.clone(),
                    body: b2,
                })
            }
        }
        _ => p.clone(),
    })
}

/// Drops `0` components of parallel compositions and restrictions of `0`
/// in the active part of a process. Both are structural congruences.
pub fn prune(p: &Process) -> Process {
    let arc = Arc::new(p.clone());
    let out = prune_arc(&arc);
    drop(arc);
    Arc::try_unwrap(out).unwrap_or_else(|shared| (*shared).clone())
}

/// True when no active, unreplicated, nullary input waits on a restricted
/// return name: every sequential continuation and the top-level completion
/// input have fired.
pub fn has_terminated(p: &Process) -> bool {
    fn walk(p: &Process, ret: &mut Vec<Name>) -> bool {
        crate::grow(|| match p {
            Process::Nil | Process::Output { .. } | Process::Repl(_) => true,
            Process::Input { subject, binders, .. } => {
                !(binders.is_empty() && subject.len() == 1 && matches!(&subject[0], Value::Name(n) if ret.contains(n)))
            }
            Process::Par(l, r) => walk(l, ret) && walk(r, ret),
            Process::Restrict { bindings, body } => {
                let mark = ret.len();
                for (n, t) in bindings {
                    if matches!(t, BaseType::Named(i) if i.as_str() == RET_TYPE) {
                        ret.push(n.clone());
                    }
                }
                let ok = walk(body, ret);
                ret.truncate(mark);
                ok
            }
            Process::Sum(branches) => branches.iter().all(|(_, b)| walk(b, ret)),
        })
    }
    walk(p, &mut Vec::new())
}

fn active_outputs<'a>(p: &'a Process, bound: &mut Vec<Name>, out: &mut Vec<(&'a [Value], &'a [crate::epi::Expr])>) {
    crate::grow(|| match p {
        Process::Output { subject, objects, .. } => {
            if subject.iter().all(|v| v.as_name().is_none_or(|n| !bound.contains(n))) {
                out.push((subject, objects));
            }
        }
        Process::Par(l, r) => {
            active_outputs(l, bound, out);
            active_outputs(r, bound, out);
        }
        Process::Restrict { bindings, body } => {
            let mark = bound.len();
            bound.extend(bindings.iter().map(|(n, _)| n.clone()));
            active_outputs(body, bound, out);
            bound.truncate(mark);
        }
        _ => {}
    })
}

fn occurs_anywhere(p: &Process, subject: &[Value]) -> bool {
    crate::grow(|| match p {
        Process::Nil => false,
        Process::Output { subject: s, body, .. } => s == subject || occurs_anywhere(body, subject),
        Process::Input { body, .. } | Process::Restrict { body, .. } | Process::Repl(body) => occurs_anywhere(body, subject),
        Process::Par(l, r) => occurs_anywhere(l, subject) || occurs_anywhere(r, subject),
        Process::Sum(branches) => branches.iter().any(|(_, b)| occurs_anywhere(b, subject)),
    })
}

/// The value in each field cell of a quiescent state.
pub fn decode_fields(p: &Process, unit: &CompilationUnit) -> Result<BTreeMap<(Name, Name), Value>, DecodeError> {
    if !Analysis::new(p).is_quiescent() {
        return Err(DecodeError::NotQuiescent);
    }
    let mut outputs = Vec::new();
    active_outputs(p, &mut Vec::new(), &mut outputs);
    let mut result = BTreeMap::new();
    for ((a, f), subject) in &unit.decoder {
        let cells: Vec<_> = outputs.iter().filter(|(s, _)| *s == subject.as_slice()).collect();
        let (class, field) = (a.clone(), f.clone());
        match cells.len() {
            0 if occurs_anywhere(p, subject) => return Err(DecodeError::Guarded { class, field }),
            0 => return Err(DecodeError::Missing { class, field }),
            1 => {}
            count => return Err(DecodeError::Duplicate { class, field, count }),
        }
        let objects = cells[0].1;
        let value = match objects {
            [e] => eval_expr(e).map_err(|_| DecodeError::Malformed {
                class: class.clone(),
                field: field.clone(),
            })?,
            _ => return Err(DecodeError::Malformed { class, field }),
        };
        result.insert((a.clone(), f.clone()), value);
    }
    Ok(result)
}
