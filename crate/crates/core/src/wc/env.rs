//! Runtime environments and the declaration semantics.
//!
//! Every environment is an ordered list of bindings. Lookup and update act
//! on the leftmost binding of a key.

use thiserror::Error;

use super::syntax::{ClassDecl, WcStm};
use crate::epi::{Name, Value};

/// An ordered list of `(key, value)` pairs with leftmost lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Env<K, V> {
    pub entries: Vec<(K, V)>,
}

impl<K: PartialEq, V> Default for Env<K, V> {
    fn default() -> Self {
        Env { entries: Vec::new() }
    }
}

impl<K: PartialEq, V> Env<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, k: &K) -> Option<&V> {
        self.entries.iter().find(|(q, _)| q == k).map(|(_, v)| v)
    }

    pub fn get_mut(&mut self, k: &K) -> Option<&mut V> {
        self.entries.iter_mut().find(|(q, _)| q == k).map(|(_, v)| v)
    }

    pub fn contains(&self, k: &K) -> bool {
        self.get(k).is_some()
    }

    /// Replaces the leftmost binding of `k`; false when there is none.
    pub fn update(&mut self, k: &K, v: V) -> bool {
        match self.get_mut(k) {
            Some(slot) => {
                *slot = v;
                true
            }
            None => false,
        }
    }

    /// Adds a binding on the left.
    pub fn push_front(&mut self, k: K, v: V) {
        self.entries.insert(0, (k, v));
    }

    pub fn pop_front(&mut self) -> Option<(K, V)> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    /// Adds a binding on the right.
    pub fn push_back(&mut self, k: K, v: V) {
        self.entries.push((k, v));
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(K, V)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parameters and body of a method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodBody {
    pub params: Vec<Name>,
    pub body: WcStm,
}

/// Local variables and `this`, keyed by name (`this` is the name `this`).
pub type EnvV = Env<Name, Value>;
pub type EnvF = Env<Name, Value>;
pub type EnvM = Env<Name, MethodBody>;
pub type EnvS = Env<Name, EnvF>;
pub type EnvT = Env<Name, EnvM>;

pub fn this_name() -> Name {
    Name::new("this")
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DeclError {
    #[error("class {0} declared twice")]
    DuplicateClass(Name),
    #[error("field {field} declared twice in class {class}")]
    DuplicateField { class: Name, field: Name },
    #[error("method {method} declared twice in class {class}")]
    DuplicateMethod { class: Name, method: Name },
}

/// Builds `envS` and `envT` from the class declarations, in declaration
/// order.
pub fn build_environments(classes: &[ClassDecl]) -> Result<(EnvS, EnvT), DeclError> {
    let mut env_s = EnvS::new();
    let mut env_t = EnvT::new();
    for c in classes {
        if env_s.contains(&c.name) {
            return Err(DeclError::DuplicateClass(c.name.clone()));
        }
        let mut env_f = EnvF::new();
        for (p, v) in &c.fields {
            if env_f.contains(p) {
                return Err(DeclError::DuplicateField {
                    class: c.name.clone(),
                    field: p.clone(),
                });
            }
            env_f.push_back(p.clone(), v.clone());
        }
        let mut env_m = EnvM::new();
        for m in &c.methods {
            if env_m.contains(&m.name) {
                return Err(DeclError::DuplicateMethod {
                    class: c.name.clone(),
                    method: m.name.clone(),
                });
            }
            env_m.push_back(
                m.name.clone(),
                MethodBody {
                    params: m.params.clone(),
                    body: m.body.clone(),
                },
            );
        }
        env_s.push_back(c.name.clone(), env_f);
        env_t.push_back(c.name.clone(), env_m);
    }
    Ok((env_s, env_t))
}
