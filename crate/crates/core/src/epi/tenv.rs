//! The `.tenv` text format for type environments.
//!
//! ```text
//! name x : I
//! type I = (ch(int, J), { J = (none, {}) })
//! ```

use std::fmt::Write as _;

use super::syntax::Name;
use super::types::{Capability, TreeType, TypeEnv, TypeName};
use crate::lex::{Cursor, ParseError};

const KEYWORDS: &[&str] = &["int", "bool"];

pub fn parse_tenv(src: &str) -> Result<TypeEnv, ParseError> {
    let mut c = Cursor::new(src, KEYWORDS)?;
    let mut gamma = TypeEnv::new();
    loop {
        if c.eat_keyword("name") {
            let x = c.expect_ident("a name")?;
            c.expect_punct(":")?;
            let b = super::parse::base_type(&mut c)?;
            if gamma.names.insert(Name::new(&x), b).is_some() {
                return c.error(format!("name `{x}` declared twice"));
            }
        } else if c.eat_keyword("type") {
            let i = c.expect_ident("a type name")?;
            c.expect_punct("=")?;
            let tree = tree_type(&mut c)?;
            if gamma.typenames.insert(TypeName::new(&i), tree).is_some() {
                return c.error(format!("type `{i}` declared twice"));
            }
        } else {
            c.expect_eof()?;
            return Ok(gamma);
        }
    }
}

fn tree_type(c: &mut Cursor) -> Result<TreeType, ParseError> {
    crate::grow(|| {
        c.expect_punct("(")?;
        let capability = if c.eat_keyword("none") {
            Capability::NoChan
        } else if c.eat_keyword("ch") {
            c.expect_punct("(")?;
            let mut carried = Vec::new();
            if !c.is_punct(")") {
                loop {
                    carried.push(super::parse::base_type(c)?);
                    if !c.eat_punct(",") {
                        break;
                    }
                }
            }
            c.expect_punct(")")?;
            Capability::Chan(carried)
        } else {
            return c.unexpected("`none` or `ch(...)`");
        };
        c.expect_punct(",")?;
        c.expect_punct("{")?;
        let mut tree = TreeType::new(capability);
        if !c.is_punct("}") {
            loop {
                let key = c.expect_ident("a type name")?;
                c.expect_punct("=")?;
                let child = tree_type(c)?;
                if tree.local.insert(TypeName::new(&key), child).is_some() {
                    return c.error(format!("type `{key}` appears twice in one local environment"));
                }
                if !c.eat_punct(",") {
                    break;
                }
            }
        }
        c.expect_punct("}")?;
        c.expect_punct(")")?;
        Ok(tree)
    })
}

/// Prints names first, then type names, each sorted.
pub fn print_tenv(gamma: &TypeEnv) -> String {
    let mut out = String::new();
    for (x, b) in &gamma.names {
        let _ = writeln!(out, "name {x} : {b}");
    }
    for (i, t) in &gamma.typenames {
        let _ = writeln!(out, "type {i} = {t}");
    }
    out
}
