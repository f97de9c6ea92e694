//! Abstract syntax of epi processes, values, expressions and labels.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::ops::Operator;
use super::types::BaseType;

/// A channel name.
///
/// Names produced by the parser never contain `#`; [`Name::fresh`] always
/// does, so freshly minted names cannot collide with source names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(Arc<str>);

static FRESH_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// A globally fresh name derived from `base`, of the form `base#k`.
    pub fn fresh(base: &Name) -> Name {
        let stem = base.0.split('#').next().unwrap_or_default();
        let stem = if stem.is_empty() { "n" } else { stem };
        let k = FRESH_COUNTER.fetch_add(1, Ordering::Relaxed);
        Name(Arc::from(format!("{stem}#{k}")))
    }

    /// True for names minted by [`Name::fresh`] or by canonicalisation.
    pub fn is_generated(&self) -> bool {
        self.0.contains('#')
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Name(Name),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn name(s: &str) -> Value {
        Value::Name(Name::new(s))
    }

    pub fn as_name(&self) -> Option<&Name> {
        match self {
            Value::Name(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Name(n) => write!(f, "{n}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<Name> for Value {
    fn from(n: Name) -> Self {
        Value::Name(n)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Val(Value),
    Op(Operator, Vec<Expr>),
}

impl Expr {
    pub fn name(s: &str) -> Expr {
        Expr::Val(Value::name(s))
    }

    pub fn int(i: i64) -> Expr {
        Expr::Val(Value::Int(i))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Val(Value::Bool(b))
    }

    pub fn op(op: Operator, args: Vec<Expr>) -> Expr {
        Expr::Op(op, args)
    }

    pub fn for_each_name(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Expr::Val(Value::Name(n)) => f(n),
            Expr::Val(_) => {}
            Expr::Op(_, args) => args.iter().for_each(|a| a.for_each_name(f)),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Value> for Expr {
    fn from(v: Value) -> Self {
        Expr::Val(v)
    }
}

/// An epi process. Subterms are reference counted so that transitions can
/// share the untouched parts of a term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Process {
    Nil,
    Input {
        subject: Vec<Value>,
        binders: Vec<Name>,
        body: Arc<Process>,
    },
    Output {
        subject: Vec<Value>,
        objects: Vec<Expr>,
        body: Arc<Process>,
    },
    Par(Arc<Process>, Arc<Process>),
    Restrict {
        bindings: Vec<(Name, BaseType)>,
        body: Arc<Process>,
    },
    Repl(Arc<Process>),
    /// Guarded sum; never empty.
    Sum(Vec<(Expr, Arc<Process>)>),
}

fn shared_nil() -> Arc<Process> {
    static NIL: OnceLock<Arc<Process>> = OnceLock::new();
    NIL.get_or_init(|| Arc::new(Process::Nil)).clone()
}

impl Process {
    pub fn nil() -> Process {
        Process::Nil
    }

    pub fn input(subject: Vec<Value>, binders: Vec<Name>, body: Process) -> Process {
        Process::Input {
            subject,
            binders,
            body: Arc::new(body),
        }
    }

    pub fn output(subject: Vec<Value>, objects: Vec<Expr>, body: Process) -> Process {
        Process::Output {
            subject,
            objects,
            body: Arc::new(body),
        }
    }

    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Arc::new(left), Arc::new(right))
    }

    /// Left-nested parallel composition of all components; `0` when empty.
    pub fn par_all(components: impl IntoIterator<Item = Process>) -> Process {
        let mut it = components.into_iter();
        match it.next() {
            None => Process::Nil,
            Some(first) => it.fold(first, Process::par),
        }
    }

    /// `new bindings (body)`, or just `body` when there are no bindings.
    pub fn restrict(bindings: Vec<(Name, BaseType)>, body: Process) -> Process {
        if bindings.is_empty() {
            body
        } else {
            Process::Restrict {
                bindings,
                body: Arc::new(body),
            }
        }
    }

    pub fn repl(body: Process) -> Process {
        Process::Repl(Arc::new(body))
    }

    pub fn sum(branches: Vec<(Expr, Process)>) -> Process {
        assert!(!branches.is_empty(), "a sum needs at least one branch");
        Process::Sum(branches.into_iter().map(|(g, p)| (g, Arc::new(p))).collect())
    }

    /// `[e] then_branch + [not e] else_branch`.
    pub fn if_then_else(cond: Expr, then_branch: Process, else_branch: Process) -> Process {
        let negated = Expr::Op(Operator::Not, vec![cond.clone()]);
        Process::sum(vec![(cond, then_branch), (negated, else_branch)])
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Nil)
    }

    /// Number of syntax nodes; used for generator budgets and diagnostics.
    pub fn size(&self) -> usize {
        stacker::maybe_grow(32 * 1024, 1024 * 1024, || match self {
            Process::Nil => 1,
            Process::Input { body, .. } | Process::Output { body, .. } => 1 + body.size(),
            Process::Par(l, r) => 1 + l.size() + r.size(),
            Process::Restrict { body, .. } => 1 + body.size(),
            Process::Repl(body) => 1 + body.size(),
            Process::Sum(branches) => 1 + branches.iter().map(|(_, p)| p.size()).sum::<usize>(),
        })
    }

    fn take_unique_children(&mut self, out: &mut Vec<Arc<Process>>) {
        fn take(slot: &mut Arc<Process>, out: &mut Vec<Arc<Process>>) {
            if Arc::strong_count(slot) == 1 && !slot.is_nil() {
                out.push(std::mem::replace(slot, shared_nil()));
            }
        }
        match self {
            Process::Nil => {}
            Process::Input { body, .. }
            | Process::Output { body, .. }
            | Process::Restrict { body, .. }
            | Process::Repl(body) => take(body, out),
            Process::Par(l, r) => {
                take(l, out);
                take(r, out);
            }
            Process::Sum(branches) => branches.iter_mut().for_each(|(_, p)| take(p, out)),
        }
    }
}

// Long runs build very deep terms; dropping them recursively would overflow
// the stack.
impl Drop for Process {
    fn drop(&mut self) {
        let mut pending = Vec::new();
        self.take_unique_children(&mut pending);
        while let Some(child) = pending.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(child) {
                inner.take_unique_children(&mut pending);
            }
        }
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A transition label. Output labels carry the typed names they extrude.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Tau,
    Recv {
        subject: Vec<Value>,
        objects: Vec<Value>,
    },
    Send {
        subject: Vec<Value>,
        extruded: Vec<(Name, BaseType)>,
        objects: Vec<Value>,
    },
}

impl Label {
    pub fn bound_names(&self) -> Vec<Name> {
        match self {
            Label::Send { extruded, .. } => extruded.iter().map(|(n, _)| n.clone()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn is_send(&self) -> bool {
        matches!(self, Label::Send { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Label::Tau => "tau",
            Label::Recv { .. } => "recv",
            Label::Send { .. } => "send",
        }
    }
}

fn write_vector(f: &mut fmt::Formatter<'_>, values: &[Value], sep: &str) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("τ"),
            Label::Recv { subject, objects } => {
                write_vector(f, subject, "*")?;
                f.write_str("?(")?;
                write_vector(f, objects, ", ")?;
                f.write_str(")")
            }
            Label::Send {
                subject,
                extruded,
                objects,
            } => {
                write_vector(f, subject, "*")?;
                f.write_str("!(")?;
                if !extruded.is_empty() {
                    f.write_str("new ")?;
                    for (i, (n, t)) in extruded.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{n}:{t}")?;
                    }
                    f.write_str(" ")?;
                }
                write_vector(f, objects, ", ")?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
