//! Printer for the `.wc` text format.

use std::fmt::{self, Write as _};

use super::syntax::{ClassDecl, InterfaceDecl, WcExpr, WcProgram, WcStm};
use crate::epi::print::write_op;

const LEVEL_POSTFIX: u8 = 7;

fn write_expr(f: &mut dyn fmt::Write, e: &WcExpr, min: u8) -> fmt::Result {
    crate::grow(|| match e {
        WcExpr::Val(v) => write!(f, "{v}"),
        WcExpr::Var(x) => write!(f, "{x}"),
        WcExpr::This => f.write_str("this"),
        WcExpr::Field(base, p) => {
            write_expr(f, base, LEVEL_POSTFIX)?;
            write!(f, ".{p}")
        }
        WcExpr::Op(op, args) => write_op(f, *op, args, min, &mut |f, a, m| write_expr(f, a, m)),
    })
}

impl fmt::Display for WcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn needs_braces(s: &WcStm) -> bool {
    matches!(s, WcStm::Seq(..) | WcStm::VarDecl { .. })
}

fn write_block(out: &mut String, s: &WcStm, indent: usize) {
    out.push_str("{\n");
    pad(out, indent + 1);
    write_stm(out, s, indent + 1);
    out.push('\n');
    pad(out, indent);
    out.push('}');
}

/// A statement nested in `if` or `while`, or on the left of `;`.
fn write_nested(out: &mut String, s: &WcStm, indent: usize) {
    if needs_braces(s) {
        write_block(out, s, indent);
    } else {
        write_stm(out, s, indent);
    }
}

/// Writes `s` starting at the current position; continuation lines are
/// indented by `indent`.
fn write_stm(out: &mut String, s: &WcStm, indent: usize) {
    crate::grow(|| match s {
        WcStm::Skip => out.push_str("skip"),
        WcStm::VarDecl { var, ty, init, body } => {
            let _ = writeln!(out, "var {ty} {var} := {init} in");
            pad(out, indent);
            write_stm(out, body, indent);
        }
        WcStm::AssignVar(x, e) => {
            let _ = write!(out, "{x} := {e}");
        }
        WcStm::AssignField(p, e) => {
            let _ = write!(out, "this.{p} := {e}");
        }
        WcStm::Seq(a, b) => {
            write_nested(out, a, indent);
            out.push_str(";\n");
            pad(out, indent);
            write_stm(out, b, indent);
        }
        WcStm::If(c, t, e) => {
            let _ = write!(out, "if {c} then ");
            write_nested(out, t, indent);
            out.push_str(" else ");
            write_nested(out, e, indent);
        }
        WcStm::While(c, body) => {
            let _ = write!(out, "while {c} do ");
            write_nested(out, body, indent);
        }
        WcStm::Call { target, method, args } => {
            let mut t = String::new();
            let _ = write_expr(&mut t, target, LEVEL_POSTFIX);
            let _ = write!(out, "{t}::{method}(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{a}");
            }
            out.push(')');
        }
    })
}

impl fmt::Display for WcStm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_stm(&mut out, self, 0);
        f.write_str(&out)
    }
}

fn write_interface(out: &mut String, i: &InterfaceDecl) {
    let _ = writeln!(out, "interface {} {{", i.name);
    for (p, b) in &i.fields {
        let _ = writeln!(out, "  field {p} : {b};");
    }
    for (m, params) in &i.methods {
        let params: Vec<String> = params.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(out, "  method {m} : proc({});", params.join(", "));
    }
    out.push_str("}\n");
}

fn write_class(out: &mut String, c: &ClassDecl) {
    let _ = writeln!(out, "class {} : {} {{", c.name, c.iface);
    for (p, v) in &c.fields {
        let _ = writeln!(out, "  field {p} := {v};");
    }
    for m in &c.methods {
        let params: Vec<String> = m.params.iter().map(|x| x.to_string()).collect();
        let _ = write!(out, "  method {}({}) ", m.name, params.join(", "));
        write_block(out, &m.body, 1);
        out.push('\n');
    }
    out.push_str("}\n");
}

pub fn print_program(p: &WcProgram) -> String {
    let mut out = String::new();
    for i in &p.interfaces {
        write_interface(&mut out, i);
        out.push('\n');
    }
    for c in &p.classes {
        write_class(&mut out, c);
        out.push('\n');
    }
    out.push_str("main ");
    write_block(&mut out, &p.main, 0);
    out.push('\n');
    out
}

impl fmt::Display for WcProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::{BaseType, Operator};

    #[test]
    fn nested_statements_are_braced() {
        let s = WcStm::seq(
            WcStm::var_decl("x", BaseType::Int, WcExpr::int(1), WcStm::Skip),
            WcStm::while_(
                WcExpr::op(Operator::Lt, vec![WcExpr::var("x"), WcExpr::int(3)]),
                WcStm::seq(WcStm::Skip, WcStm::Skip),
            ),
        );
        assert_eq!(
            s.to_string(),
            "{\n  var int x := 1 in\n  skip\n};\nwhile x < 3 do {\n  skip;\n  skip\n}"
        );
    }

    #[test]
    fn call_targets_and_fields() {
        let s = WcStm::call(
            WcExpr::field(WcExpr::This, "next"),
            "f",
            vec![WcExpr::op(Operator::Add, vec![WcExpr::int(1), WcExpr::int(-2)]), WcExpr::bool(true)],
        );
        assert_eq!(s.to_string(), "this.next::f(1 + -2, true)");
    }
}
