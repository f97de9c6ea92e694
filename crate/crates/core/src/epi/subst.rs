//! Free names, capture-avoiding substitution and alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::syntax::{Expr, Name, Process, Value};
use super::types::BaseType;

pub type Substitution = BTreeMap<Name, Value>;

fn walk_free(p: &Process, bound: &mut HashMap<Name, usize>, out: &mut BTreeSet<Name>) {
    crate::grow(|| {
        let see = |n: &Name, bound: &HashMap<Name, usize>, out: &mut BTreeSet<Name>| {
            if bound.get(n).copied().unwrap_or(0) == 0 {
                out.insert(n.clone());
            }
        };
        match p {
            Process::Nil => {}
            Process::Input { subject, binders, body } => {
                subject.iter().filter_map(Value::as_name).for_each(|n| see(n, bound, out));
                enter(bound, binders.iter());
                walk_free(body, bound, out);
                leave(bound, binders.iter());
            }
            Process::Output { subject, objects, body } => {
                subject.iter().filter_map(Value::as_name).for_each(|n| see(n, bound, out));
                for o in objects {
                    o.for_each_name(&mut |n| see(n, bound, out));
                }
                walk_free(body, bound, out);
            }
            Process::Par(l, r) => {
                walk_free(l, bound, out);
                walk_free(r, bound, out);
            }
            Process::Restrict { bindings, body } => {
                enter(bound, bindings.iter().map(|(n, _)| n));
                walk_free(body, bound, out);
                leave(bound, bindings.iter().map(|(n, _)| n));
            }
            Process::Repl(body) => walk_free(body, bound, out),
            Process::Sum(branches) => {
                for (g, b) in branches {
                    g.for_each_name(&mut |n| see(n, bound, out));
                    walk_free(b, bound, out);
                }
            }
        }
    })
}

fn enter<'a>(bound: &mut HashMap<Name, usize>, names: impl Iterator<Item = &'a Name>) {
    for n in names {
        *bound.entry(n.clone()).or_insert(0) += 1;
    }
}

fn leave<'a>(bound: &mut HashMap<Name, usize>, names: impl Iterator<Item = &'a Name>) {
    for n in names {
        if let Some(k) = bound.get_mut(n) {
            *k -= 1;
        }
    }
}

pub fn free_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    walk_free(p, &mut HashMap::new(), &mut out);
    out
}

fn subst_value(v: &Value, sigma: &Substitution) -> Value {
    match v {
        Value::Name(n) => sigma.get(n).cloned().unwrap_or_else(|| v.clone()),
        _ => v.clone(),
    }
}

pub fn subst_expr(e: &Expr, sigma: &Substitution) -> Expr {
    match e {
        Expr::Val(v) => Expr::Val(subst_value(v, sigma)),
        Expr::Op(op, args) => Expr::Op(*op, args.iter().map(|a| subst_expr(a, sigma)).collect()),
    }
}

fn range_names(sigma: &Substitution) -> BTreeSet<Name> {
    sigma.values().filter_map(Value::as_name).cloned().collect()
}

/// Removes the binders from the domain of `sigma` and renames every binder
/// that would capture a name in its range. Returns the new binder names.
fn pass_binders(binders: &[Name], sigma: &Substitution) -> (Vec<Name>, Substitution) {
    let mut inner = sigma.clone();
    for b in binders {
        inner.remove(b);
    }
    let range = range_names(&inner);
    let mut renamed = Vec::with_capacity(binders.len());
    for b in binders {
        if range.contains(b) {
            let fresh = Name::fresh(b);
            inner.insert(b.clone(), Value::Name(fresh.clone()));
            renamed.push(fresh);
        } else {
            renamed.push(b.clone());
        }
    }
    (renamed, inner)
}

pub(crate) fn subst_arc(p: &Arc<Process>, sigma: &Substitution) -> Arc<Process> {
    if sigma.is_empty() {
        p.clone()
    } else {
        Arc::new(subst_process(p, sigma))
    }
}

fn subst_process(p: &Process, sigma: &Substitution) -> Process {
    crate::grow(|| match p {
        Process::Nil => Process::Nil,
        Process::Input { subject, binders, body } => {
            let (binders, inner) = pass_binders(binders, sigma);
            Process::Input {
                subject: subject.iter().map(|v| subst_value(v, sigma)).collect(),
                binders,
                body: subst_arc(body, &inner),
            }
        }
        Process::Output { subject, objects, body } => Process::Output {
            subject: subject.iter().map(|v| subst_value(v, sigma)).collect(),
            objects: objects.iter().map(|e| subst_expr(e, sigma)).collect(),
            body: subst_arc(body, sigma),
        },
        Process::Par(l, r) => Process::Par(subst_arc(l, sigma), subst_arc(r, sigma)),
        Process::Restrict { bindings, body } => {
            let names: Vec<Name> = bindings.iter().map(|(n, _)| n.clone()).collect();
            let (names, inner) = pass_binders(&names, sigma);
            Process::Restrict {
                bindings: names.into_iter().zip(bindings.iter().map(|(_, t)| t.clone())).collect(),
                body: subst_arc(body, &inner),
            }
        }
        Process::Repl(body) => Process::Repl(subst_arc(body, sigma)),
        Process::Sum(branches) => Process::Sum(
            branches
                .iter()
                .map(|(g, b)| (subst_expr(g, sigma), subst_arc(b, sigma)))
                .collect(),
        ),
    })
}

/// Capture-avoiding simultaneous substitution.
pub fn substitute(p: &Process, sigma: &Substitution) -> Process {
    if sigma.is_empty() {
        p.clone()
    } else {
        subst_process(p, sigma)
    }
}

/// Names of `targets` in the order of their first free occurrence in `p`.
fn first_occurrences(p: &Process, targets: &BTreeSet<Name>) -> Vec<Name> {
    fn walk(p: &Process, targets: &BTreeSet<Name>, shadow: &mut HashMap<Name, usize>, out: &mut Vec<Name>) {
        crate::grow(|| {
            let see = |n: &Name, shadow: &HashMap<Name, usize>, out: &mut Vec<Name>| {
                if targets.contains(n) && shadow.get(n).copied().unwrap_or(0) == 0 && !out.contains(n) {
                    out.push(n.clone());
                }
            };
            match p {
                Process::Nil => {}
                Process::Input { subject, binders, body } => {
                    subject.iter().filter_map(Value::as_name).for_each(|n| see(n, shadow, out));
                    enter(shadow, binders.iter());
                    walk(body, targets, shadow, out);
                    leave(shadow, binders.iter());
                }
                Process::Output { subject, objects, body } => {
                    subject.iter().filter_map(Value::as_name).for_each(|n| see(n, shadow, out));
                    for o in objects {
                        o.for_each_name(&mut |n| see(n, shadow, out));
                    }
                    walk(body, targets, shadow, out);
                }
                Process::Par(l, r) => {
                    walk(l, targets, shadow, out);
                    walk(r, targets, shadow, out);
                }
                Process::Restrict { bindings, body } => {
                    enter(shadow, bindings.iter().map(|(n, _)| n));
                    walk(body, targets, shadow, out);
                    leave(shadow, bindings.iter().map(|(n, _)| n));
                }
                Process::Repl(body) => walk(body, targets, shadow, out),
                Process::Sum(branches) => {
                    for (g, b) in branches {
                        g.for_each_name(&mut |n| see(n, shadow, out));
                        walk(b, targets, shadow, out);
                    }
                }
            }
        })
    }
    let mut out = Vec::new();
    walk(p, targets, &mut HashMap::new(), &mut out);
    out
}

struct Canon {
    scopes: HashMap<Name, Vec<Name>>,
    next: usize,
}

impl Canon {
    fn mint(&mut self) -> Name {
        let n = Name::new(format!("#{}", self.next));
        self.next += 1;
        n
    }

    fn value(&self, v: &Value) -> Value {
        match v {
            Value::Name(n) => match self.scopes.get(n).and_then(|s| s.last()) {
                Some(m) => Value::Name(m.clone()),
                None => v.clone(),
            },
            _ => v.clone(),
        }
    }

    fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Val(v) => Expr::Val(self.value(v)),
            Expr::Op(op, args) => Expr::Op(*op, args.iter().map(|a| self.expr(a)).collect()),
        }
    }

    fn push(&mut self, from: &Name, to: Name) {
        self.scopes.entry(from.clone()).or_default().push(to);
    }

    fn pop(&mut self, from: &Name) {
        if let Some(s) = self.scopes.get_mut(from) {
            s.pop();
        }
    }

    fn process(&mut self, p: &Process) -> Process {
        crate::grow(|| match p {
            Process::Nil => Process::Nil,
            Process::Input { subject, binders, body } => {
                let subject = subject.iter().map(|v| self.value(v)).collect();
                let fresh: Vec<Name> = binders.iter().map(|_| self.mint()).collect();
                for (b, f) in binders.iter().zip(&fresh) {
                    self.push(b, f.clone());
                }
                let body = self.process(body);
                binders.iter().for_each(|b| self.pop(b));
                Process::input(subject, fresh, body)
            }
            Process::Output { subject, objects, body } => Process::output(
                subject.iter().map(|v| self.value(v)).collect(),
                objects.iter().map(|e| self.expr(e)).collect(),
                self.process(body),
            ),
            Process::Par(l, r) => {
                let l = self.process(l);
                Process::par(l, self.process(r))
            }
            Process::Restrict { bindings, body } => {
                let names: BTreeSet<Name> = bindings.iter().map(|(n, _)| n.clone()).collect();
                let used = first_occurrences(body, &names);
                let type_of = |n: &Name| bindings.iter().find(|(m, _)| m == n).map(|(_, t)| t.clone());
                let mut ordered: Vec<(Name, BaseType)> =
                    used.iter().map(|n| (n.clone(), type_of(n).expect("binder"))).collect();
                let mut unused: Vec<(Name, BaseType)> =
                    bindings.iter().filter(|(n, _)| !used.contains(n)).cloned().collect();
                unused.sort_by(|a, b| a.1.cmp(&b.1));
                ordered.extend(unused);
                let mut fresh = Vec::with_capacity(ordered.len());
                for (n, t) in &ordered {
                    let f = self.mint();
                    self.push(n, f.clone());
                    fresh.push((f, t.clone()));
                }
                let body = self.process(body);
                ordered.iter().for_each(|(n, _)| self.pop(n));
                Process::restrict(fresh, body)
            }
            Process::Repl(body) => Process::repl(self.process(body)),
            Process::Sum(branches) => Process::sum(
                branches
                    .iter()
                    .map(|(g, b)| (self.expr(g), self.process(b)))
                    .collect(),
            ),
        })
    }
}

/// The representative of `p`'s alpha-class: binders renamed to `#0, #1, ...`
/// in traversal order, with each restriction's binders sorted by first use.
pub fn canonical(p: &Process) -> Process {
    Canon {
        scopes: HashMap::new(),
        next: 0,
    }
    .process(p)
}

pub fn alpha_eq(p: &Process, q: &Process) -> bool {
    canonical(p) == canonical(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::parse::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(Name::new).collect()
    }

    #[test]
    fn free_names_examples() {
        assert_eq!(free_names(&p("0")), names(&[]));
        assert_eq!(free_names(&p("x!(y).0")), names(&["x", "y"]));
        assert_eq!(free_names(&p("new z:I (x*z!(z).0)")), names(&["x"]));
        assert_eq!(free_names(&p("x?(y).y!(z) | y!()")), names(&["x", "y", "z"]));
    }

    #[test]
    fn substitution_examples() {
        let sigma: Substitution = [(Name::new("y"), Value::name("x"))].into();
        assert_eq!(substitute(&p("y!(1).0"), &sigma), p("x!(1).0"));
        // capture: the bound x must be renamed
        let r = substitute(&p("new x:I (y!(x).0)"), &sigma);
        assert!(alpha_eq(&r, &p("new w:I (x!(w).0)")));
        assert!(!alpha_eq(&r, &p("new x:I (x!(x).0)")));
        let sigma: Substitution = [(Name::new("y"), Value::Int(3))].into();
        let r = substitute(&p("y!(1).0"), &sigma);
        assert_eq!(r, Process::output(vec![Value::Int(3)], vec![Expr::int(1)], Process::Nil));
    }

    #[test]
    fn bound_occurrences_are_untouched() {
        let sigma: Substitution = [(Name::new("y"), Value::name("x"))].into();
        let src = p("a?(y).y!() | y!()");
        assert_eq!(substitute(&src, &sigma), p("a?(y).y!() | x!()"));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&p("new a:I (a!(1).0)"), &p("new b:I (b!(1).0)")));
        assert!(alpha_eq(&p("new a:I, b:J (0)"), &p("new b:J, a:I (0)")));
        assert!(!alpha_eq(&p("a!(1).0"), &p("b!(1).0")));
        assert!(alpha_eq(&p("new a:I, b:J (a!(b))"), &p("new b:J, a:I (a!(b))")));
        assert!(!alpha_eq(&p("new a:I, b:J (a!(b))"), &p("new a:J, b:I (a!(b))")));
        assert!(alpha_eq(&p("x?(a, b).a!(b)"), &p("x?(c, d).c!(d)")));
        assert!(!alpha_eq(&p("x?(a, b).a!(b)"), &p("x?(c, d).d!(c)")));
    }
}
