//! Parser for the `.epi` concrete syntax.
//!
//! ```text
//! proc     ::= sum ('|' sum)*
//! sum      ::= '[' expr ']' prefixed ('+' '[' expr ']' prefixed)* | prefixed
//! prefixed ::= '0' | '!' prefixed | '(' proc ')'
//!            | 'new' x ':' B (',' x ':' B)* '(' proc ')'
//!            | 'if' expr 'then' prefixed 'else' prefixed
//!            | x ('*' x)* '!' '(' exprs ')' ['.' prefixed]
//!            | x ('*' x)* '?' '(' names ')' ['.' prefixed]
//! ```

use std::collections::BTreeSet;

use super::ops::Operator;
use super::syntax::{Expr, Name, Process, Value};
use super::types::BaseType;
use crate::lex::{Cursor, ParseError, Tok};

pub const KEYWORDS: &[&str] = &[
    "new", "if", "then", "else", "true", "false", "and", "or", "not", "int", "bool",
];

pub fn parse_process(src: &str) -> Result<Process, ParseError> {
    let mut c = Cursor::new(src, KEYWORDS)?;
    let p = proc(&mut c)?;
    c.expect_eof()?;
    Ok(p)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut c = Cursor::new(src, KEYWORDS)?;
    let e = expr(&mut c)?;
    c.expect_eof()?;
    Ok(e)
}

fn proc(c: &mut Cursor) -> Result<Process, ParseError> {
    crate::grow(|| {
        let mut p = sum(c)?;
        while c.eat_punct("|") {
            let r = sum(c)?;
            p = Process::par(p, r);
        }
        Ok(p)
    })
}

fn sum(c: &mut Cursor) -> Result<Process, ParseError> {
    if !c.is_punct("[") {
        return prefixed(c);
    }
    let mut branches = Vec::new();
    loop {
        c.expect_punct("[")?;
        let guard = expr(c)?;
        c.expect_punct("]")?;
        branches.push((guard, prefixed(c)?));
        if !c.eat_punct("+") {
            break;
        }
    }
    Ok(Process::sum(branches))
}

pub(crate) fn base_type(c: &mut Cursor) -> Result<BaseType, ParseError> {
    if c.eat_keyword("int") {
        Ok(BaseType::Int)
    } else if c.eat_keyword("bool") {
        Ok(BaseType::Bool)
    } else {
        Ok(BaseType::named(&c.expect_ident("a type")?))
    }
}

fn prefixed(c: &mut Cursor) -> Result<Process, ParseError> {
    crate::grow(|| {
        match c.peek().clone() {
            Tok::Int(d) if d == "0" => {
                c.bump();
                Ok(Process::Nil)
            }
            Tok::Punct("!") => {
                c.bump();
                Ok(Process::repl(prefixed(c)?))
            }
            Tok::Punct("(") => {
                c.bump();
                let p = proc(c)?;
                c.expect_punct(")")?;
                Ok(p)
            }
            Tok::Ident(k) if k == "new" => {
                c.bump();
                let mut bindings = Vec::new();
                let mut seen = BTreeSet::new();
                loop {
                    let name = c.expect_ident("a name")?;
                    if !seen.insert(name.clone()) {
                        return c.error(format!("name `{name}` restricted twice in one binder list"));
                    }
                    c.expect_punct(":")?;
                    bindings.push((Name::new(name), base_type(c)?));
                    if !c.eat_punct(",") {
                        break;
                    }
                }
                c.expect_punct("(")?;
                let body = proc(c)?;
                c.expect_punct(")")?;
                Ok(Process::restrict(bindings, body))
            }
            Tok::Ident(k) if k == "if" => {
                c.bump();
                let cond = expr(c)?;
                c.expect_keyword("then")?;
                let t = prefixed(c)?;
                c.expect_keyword("else")?;
                let e = prefixed(c)?;
                Ok(Process::if_then_else(cond, t, e))
            }
            Tok::Ident(_) if c.is_ident() => prefix(c),
            _ => c.unexpected("a process"),
        }
    })
}

fn prefix(c: &mut Cursor) -> Result<Process, ParseError> {
    let mut subject = vec![Value::Name(Name::new(c.expect_ident("a name")?))];
    while c.eat_punct("*") {
        subject.push(Value::Name(Name::new(c.expect_ident("a name in the subject")?)));
    }
    if c.eat_punct("!") {
        c.expect_punct("(")?;
        let mut objects = Vec::new();
        if !c.is_punct(")") {
            loop {
                objects.push(expr(c)?);
                if !c.eat_punct(",") {
                    break;
                }
            }
        }
        c.expect_punct(")")?;
        let body = continuation(c)?;
        Ok(Process::output(subject, objects, body))
    } else if c.eat_punct("?") {
        c.expect_punct("(")?;
        let mut binders = Vec::new();
        if !c.is_punct(")") {
            loop {
                let b = Name::new(c.expect_ident("a binder name")?);
                if binders.contains(&b) {
                    return c.error(format!("input binds `{b}` twice"));
                }
                binders.push(b);
                if !c.eat_punct(",") {
                    break;
                }
            }
        }
        c.expect_punct(")")?;
        let body = continuation(c)?;
        Ok(Process::input(subject, binders, body))
    } else {
        c.unexpected("`!`, `?` or `*`")
    }
}

fn continuation(c: &mut Cursor) -> Result<Process, ParseError> {
    if c.eat_punct(".") {
        prefixed(c)
    } else {
        Ok(Process::Nil)
    }
}

pub(crate) fn expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    crate::grow(|| {
        let mut e = and_expr(c)?;
        while c.eat_keyword("or") {
            e = Expr::op(Operator::Or, vec![e, and_expr(c)?]);
        }
        Ok(e)
    })
}

fn and_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = not_expr(c)?;
    while c.eat_keyword("and") {
        e = Expr::op(Operator::And, vec![e, not_expr(c)?]);
    }
    Ok(e)
}

fn not_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    if c.eat_keyword("not") {
        let e = crate::grow(|| not_expr(c))?;
        Ok(Expr::op(Operator::Not, vec![e]))
    } else {
        cmp_expr(c)
    }
}

fn cmp_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let e = add_expr(c)?;
    let op = if c.eat_punct("=") {
        Operator::Eq
    } else if c.eat_punct("<") {
        Operator::Lt
    } else {
        return Ok(e);
    };
    let r = add_expr(c)?;
    if c.is_punct("=") || c.is_punct("<") {
        return c.error("comparisons do not associate; add parentheses");
    }
    Ok(Expr::op(op, vec![e, r]))
}

fn add_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = mul_expr(c)?;
    loop {
        let op = if c.eat_punct("+") {
            Operator::Add
        } else if c.eat_punct("-") {
            Operator::Sub
        } else {
            return Ok(e);
        };
        e = Expr::op(op, vec![e, mul_expr(c)?]);
    }
}

fn mul_expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = atom(c)?;
    while c.eat_punct("*") {
        e = Expr::op(Operator::Mul, vec![e, atom(c)?]);
    }
    Ok(e)
}

fn atom(c: &mut Cursor) -> Result<Expr, ParseError> {
    match c.peek().clone() {
        Tok::Int(_) | Tok::Punct("-") => Ok(Expr::int(c.expect_int()?)),
        Tok::Ident(k) if k == "true" => {
            c.bump();
            Ok(Expr::bool(true))
        }
        Tok::Ident(k) if k == "false" => {
            c.bump();
            Ok(Expr::bool(false))
        }
        Tok::Punct("(") => {
            c.bump();
            let e = expr(c)?;
            c.expect_punct(")")?;
            Ok(e)
        }
        Tok::Ident(_) if c.is_ident() => Ok(Expr::name(&c.expect_ident("a name")?)),
        _ => c.unexpected("an expression"),
    }
}
