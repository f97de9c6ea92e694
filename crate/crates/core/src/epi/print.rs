//! Concrete syntax printer. The output is accepted by [`super::parse`] for
//! every process whose subjects are names.

use std::fmt;

use super::ops::Operator;
use super::syntax::{Expr, Process, Value};

const LEVEL_OR: u8 = 1;
const LEVEL_AND: u8 = 2;
const LEVEL_NOT: u8 = 3;
const LEVEL_CMP: u8 = 4;
const LEVEL_ADD: u8 = 5;
const LEVEL_MUL: u8 = 6;

pub(crate) fn binary_level(op: Operator) -> u8 {
    match op {
        Operator::Or => LEVEL_OR,
        Operator::And => LEVEL_AND,
        Operator::Not => LEVEL_NOT,
        Operator::Eq | Operator::Lt => LEVEL_CMP,
        Operator::Add | Operator::Sub => LEVEL_ADD,
        Operator::Mul => LEVEL_MUL,
    }
}

/// Writes an operator application whose leaves are printed by `leaf`. Shared
/// with the WC printer, which has its own leaf forms.
pub(crate) fn write_op<T>(
    f: &mut dyn fmt::Write,
    op: Operator,
    args: &[T],
    min: u8,
    write_arg: &mut dyn FnMut(&mut dyn fmt::Write, &T, u8) -> fmt::Result,
) -> fmt::Result {
    let level = binary_level(op);
    let paren = level < min;
    if paren {
        f.write_char('(')?;
    }
    match (op, args) {
        (Operator::Not, [a]) => {
            f.write_str("not ")?;
            write_arg(f, a, LEVEL_NOT)?;
        }
        (_, [a, b]) if op != Operator::Not => {
            let left = if level == LEVEL_CMP { level + 1 } else { level };
            write_arg(f, a, left)?;
            write!(f, " {} ", op.symbol())?;
            write_arg(f, b, level + 1)?;
        }
        _ => {
            // Arity mismatch: only reachable for hand-built terms.
            write!(f, "{}(", op.symbol())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_arg(f, a, 0)?;
            }
            f.write_char(')')?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

fn write_expr(f: &mut dyn fmt::Write, e: &Expr, min: u8) -> fmt::Result {
    crate::grow(|| match e {
        Expr::Val(v) => write!(f, "{v}"),
        Expr::Op(op, args) => write_op(f, *op, args, min, &mut |f, a, m| write_expr(f, a, m)),
    })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

fn write_subject(f: &mut dyn fmt::Write, subject: &[Value]) -> fmt::Result {
    for (i, v) in subject.iter().enumerate() {
        if i > 0 {
            f.write_char('*')?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

const LEVEL_PAR: u8 = 0;
const LEVEL_SUM: u8 = 1;
const LEVEL_PREFIX: u8 = 2;

fn write_continuation(f: &mut dyn fmt::Write, body: &Process) -> fmt::Result {
    if body.is_nil() {
        Ok(())
    } else {
        f.write_char('.')?;
        write_process(f, body, LEVEL_PREFIX)
    }
}

fn write_process(f: &mut dyn fmt::Write, p: &Process, min: u8) -> fmt::Result {
    crate::grow(|| match p {
        Process::Nil => f.write_char('0'),
        Process::Output { subject, objects, body } => {
            write_subject(f, subject)?;
            f.write_str("!(")?;
            for (i, o) in objects.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, o, 0)?;
            }
            f.write_char(')')?;
            write_continuation(f, body)
        }
        Process::Input { subject, binders, body } => {
            write_subject(f, subject)?;
            f.write_str("?(")?;
            for (i, b) in binders.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
            f.write_char(')')?;
            write_continuation(f, body)
        }
        Process::Par(l, r) => {
            let paren = min > LEVEL_PAR;
            if paren {
                f.write_char('(')?;
            }
            write_process(f, l, LEVEL_PAR)?;
            f.write_str(" | ")?;
            write_process(f, r, LEVEL_SUM)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
        Process::Restrict { bindings, body } => {
            f.write_str("new ")?;
            for (i, (n, t)) in bindings.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{n}:{t}")?;
            }
            f.write_str(" (")?;
            write_process(f, body, LEVEL_PAR)?;
            f.write_char(')')
        }
        Process::Repl(body) => {
            f.write_char('!')?;
            write_process(f, body, LEVEL_PREFIX)
        }
        Process::Sum(branches) => {
            let paren = min > LEVEL_SUM;
            if paren {
                f.write_char('(')?;
            }
            for (i, (g, b)) in branches.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                f.write_char('[')?;
                write_expr(f, g, 0)?;
                f.write_str("] ")?;
                write_process(f, b, LEVEL_PREFIX)?;
            }
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    })
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_process(f, self, LEVEL_PAR)
    }
}

pub fn print_process(p: &Process) -> String {
    let mut s = String::new();
    write_process(&mut s, p, LEVEL_PAR).expect("writing to a String cannot fail");
    s
}
