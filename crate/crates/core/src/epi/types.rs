//! Tree types for composite channel names and type environments.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::syntax::Name;

/// A nominal type name. Lives in its own namespace, disjoint from channel names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeName(Arc<str>);

impl TypeName {
    pub fn new(s: impl AsRef<str>) -> Self {
        TypeName(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TypeName {
    fn from(s: &str) -> Self {
        TypeName::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseType {
    Named(TypeName),
    Int,
    Bool,
}

impl BaseType {
    pub fn named(s: &str) -> BaseType {
        BaseType::Named(TypeName::new(s))
    }

    pub fn as_type_name(&self) -> Option<&TypeName> {
        match self {
            BaseType::Named(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseType::Named(t) => write!(f, "{t}"),
            BaseType::Int => f.write_str("int"),
            BaseType::Bool => f.write_str("bool"),
        }
    }
}

impl fmt::Debug for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Channel capability: `ch(B1, ..., Bn)` or `none` (not usable as a channel).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Capability {
    Chan(Vec<BaseType>),
    NoChan,
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capability::NoChan => f.write_str("none"),
            Capability::Chan(ts) => {
                f.write_str("ch(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `(C, Δ)`: what a name can carry when it ends a subject vector, and which
/// type names may follow it (with their meaning at that position).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeType {
    pub capability: Capability,
    pub local: BTreeMap<TypeName, TreeType>,
}

impl TreeType {
    pub fn new(capability: Capability) -> Self {
        TreeType {
            capability,
            local: BTreeMap::new(),
        }
    }

    pub fn chan(carried: Vec<BaseType>) -> Self {
        TreeType::new(Capability::Chan(carried))
    }

    pub fn no_chan() -> Self {
        TreeType::new(Capability::NoChan)
    }

    pub fn with(mut self, key: impl Into<TypeName>, child: TreeType) -> Self {
        self.local.insert(key.into(), child);
        self
    }
}

impl fmt::Display for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.capability)?;
        for (i, (k, t)) in self.local.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{k} = {t}")?;
        }
        if self.local.is_empty() {
            f.write_str("})")
        } else {
            f.write_str(" })")
        }
    }
}

impl fmt::Debug for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Γ: base types of names, and tree types of type names.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEnv {
    pub names: BTreeMap<Name, BaseType>,
    pub typenames: BTreeMap<TypeName, TreeType>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<Name>, ty: BaseType) -> &mut Self {
        self.names.insert(name.into(), ty);
        self
    }

    pub fn define(&mut self, ty: impl Into<TypeName>, tree: TreeType) -> &mut Self {
        self.typenames.insert(ty.into(), tree);
        self
    }

    pub fn with_name(mut self, name: impl Into<Name>, ty: BaseType) -> Self {
        self.bind(name, ty);
        self
    }

    pub fn with_type(mut self, ty: impl Into<TypeName>, tree: TreeType) -> Self {
        self.define(ty, tree);
        self
    }

    /// Γ extended (or overridden) with the given bindings.
    pub fn extended<'a>(&self, bindings: impl IntoIterator<Item = (&'a Name, &'a BaseType)>) -> TypeEnv {
        let mut out = self.clone();
        for (n, t) in bindings {
            out.names.insert(n.clone(), t.clone());
        }
        out
    }

    pub fn lookup(&self, name: &Name) -> Option<&BaseType> {
        self.names.get(name)
    }
}

impl fmt::Debug for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::tenv::print_tenv(self))
    }
}

/// A dangling type-name reference found by [`check_wellformed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormednessDiagnostic {
    pub type_name: TypeName,
    pub location: String,
}

impl fmt::Display for WellFormednessDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} unbound (referenced by {})", self.type_name, self.location)
    }
}

/// Every type name used by a name binding or inside a `ch(...)` anywhere must
/// have a global entry. Keys of nested local environments are positional and
/// need none.
pub fn check_wellformed(gamma: &TypeEnv) -> Result<(), Vec<WellFormednessDiagnostic>> {
    let mut diags = Vec::new();
    let mut need = |t: &BaseType, location: String| {
        if let BaseType::Named(i) = t {
            if !gamma.typenames.contains_key(i) {
                diags.push(WellFormednessDiagnostic {
                    type_name: i.clone(),
                    location,
                });
            }
        }
    };
    for (x, b) in &gamma.names {
        need(b, format!("name {x}"));
    }
    fn walk(tree: &TreeType, path: String, need: &mut dyn FnMut(&BaseType, String)) {
        if let Capability::Chan(ts) = &tree.capability {
            for (i, t) in ts.iter().enumerate() {
                need(t, format!("{path} ch position {i}"));
            }
        }
        for (k, child) in &tree.local {
            walk(child, format!("{path}.{k}"), need);
        }
    }
    for (i, tree) in &gamma.typenames {
        walk(tree, format!("type {i}"), &mut need);
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_channel_type_is_wellformed() {
        let g = TypeEnv::new()
            .with_name("x", BaseType::named("I"))
            .with_type("I", TreeType::chan(vec![BaseType::Int]));
        assert!(check_wellformed(&g).is_ok());
    }

    #[test]
    fn dangling_name_type_is_reported() {
        let g = TypeEnv::new().with_name("x", BaseType::named("I"));
        let diags = check_wellformed(&g).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].type_name, TypeName::new("I"));
        assert_eq!(diags[0].to_string(), "I unbound (referenced by name x)");
    }

    #[test]
    fn nested_chan_references_must_be_global() {
        let g = TypeEnv::new().with_type(
            "I",
            TreeType::no_chan().with("J", TreeType::chan(vec![BaseType::named("K")])),
        );
        let diags = check_wellformed(&g).unwrap_err();
        assert_eq!(diags[0].type_name, TypeName::new("K"));
        // the local key J itself needs no global entry
        assert_eq!(diags.len(), 1);
    }
}
