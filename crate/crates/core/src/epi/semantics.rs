//! The early labelled transition relation.
//!
//! Transitions are computed in two phases. [`analyse`] walks the term once
//! and records every active prefix (one not guarded by another prefix)
//! together with the path of operators above it. Communications are pairs of
//! an active output and an active input with equal subjects. Targets are only
//! built for the transitions that are actually taken, by rebuilding the spine
//! from the root to the two prefixes and sharing everything else.
//!
//! Replication is handled by a finite scheme: an action of `!P` is an action
//! of one copy, leaving `!P | P'`, and two copies may communicate, leaving
//! `!P | new z (P1' | P2')` with the output on the left.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use super::ops::eval_expr;
use super::subst::{free_names, subst_arc, substitute, Substitution};
use super::syntax::{Label, Name, Process, Value};
use super::types::BaseType;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: Label,
    pub target: Process,
}

#[derive(Clone, Debug, Default)]
pub struct TransitionSet {
    pub transitions: Vec<Transition>,
    /// Guards and objects that could not be evaluated.
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    ParL,
    ParR,
    Restrict,
    Repl,
    Branch(usize),
}

/// An edge of the path from the root to an active prefix.
struct Cell {
    parent: Option<Rc<Cell>>,
    /// The node the edge leaves.
    node: Arc<Process>,
    step: Step,
    /// 1 for edges leaving the root.
    depth: usize,
}

fn same_cell(a: &Option<Rc<Cell>>, b: &Option<Rc<Cell>>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => Rc::ptr_eq(x, y),
        _ => false,
    }
}

fn cells_of(cell: &Option<Rc<Cell>>) -> Vec<Rc<Cell>> {
    let mut out = Vec::new();
    let mut cur = cell.clone();
    while let Some(c) = cur {
        cur = c.parent.clone();
        out.push(c);
    }
    out.reverse();
    out
}

fn depth_of(cell: &Option<Rc<Cell>>) -> usize {
    cell.as_ref().map_or(0, |c| c.depth)
}

/// An active prefix.
struct Action {
    cell: Option<Rc<Cell>>,
    leaf: Arc<Process>,
    /// Evaluated objects of an output.
    objects: Vec<Value>,
    is_output: bool,
}

impl Action {
    fn subject(&self) -> &[Value] {
        match &*self.leaf {
            Process::Input { subject, .. } | Process::Output { subject, .. } => subject,
            _ => unreachable!("actions are prefixes"),
        }
    }

    fn arity(&self) -> usize {
        match &*self.leaf {
            Process::Input { binders, .. } => binders.len(),
            _ => self.objects.len(),
        }
    }
}

/// Where a communication closes.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Site {
    /// The lowest common ancestor, a parallel composition at this edge depth.
    Par { depth: usize },
    /// Two copies of the replication whose edge has this depth.
    Repl { depth: usize },
}

/// A communication between an output and an input that has been checked to
/// be enabled.
#[derive(Clone, Debug)]
pub struct TauSite {
    output: usize,
    input: usize,
    site: Site,
}

/// All active prefixes of a process and the communications between them.
pub struct Analysis {
    root: Arc<Process>,
    actions: Vec<Action>,
    taus: Vec<TauSite>,
    pub diagnostics: Vec<String>,
}

fn collect(
    node: &Arc<Process>,
    cell: Option<Rc<Cell>>,
    actions: &mut Vec<Action>,
    diagnostics: &mut Vec<String>,
) {
    crate::grow(|| {
        let child = |step: Step| {
            Some(Rc::new(Cell {
                parent: cell.clone(),
                node: node.clone(),
                step,
                depth: depth_of(&cell) + 1,
            }))
        };
        match &**node {
            Process::Nil => {}
            Process::Input { .. } => actions.push(Action {
                cell,
                leaf: node.clone(),
                objects: Vec::new(),
                is_output: false,
            }),
            Process::Output { objects, .. } => match objects.iter().map(eval_expr).collect::<Result<Vec<_>, _>>() {
                Ok(objects) => actions.push(Action {
                    cell,
                    leaf: node.clone(),
                    objects,
                    is_output: true,
                }),
                Err(e) => diagnostics.push(format!("output {node} is stuck: {e}")),
            },
            Process::Par(l, r) => {
                collect(l, child(Step::ParL), actions, diagnostics);
                collect(r, child(Step::ParR), actions, diagnostics);
            }
            Process::Restrict { body, .. } => collect(body, child(Step::Restrict), actions, diagnostics),
            Process::Repl(body) => collect(body, child(Step::Repl), actions, diagnostics),
            Process::Sum(branches) => {
                for (i, (g, b)) in branches.iter().enumerate() {
                    match eval_expr(g) {
                        Ok(Value::Bool(true)) => collect(b, child(Step::Branch(i)), actions, diagnostics),
                        Ok(Value::Bool(false)) => {}
                        Ok(v) => diagnostics.push(format!("guard [{g}] evaluates to {v}, not a boolean")),
                        Err(e) => diagnostics.push(format!("guard [{g}] cannot be evaluated: {e}")),
                    }
                }
            }
        }
    })
}

fn restriction_bindings(node: &Process) -> &[(Name, BaseType)] {
    match node {
        Process::Restrict { bindings, .. } => bindings,
        _ => &[],
    }
}

/// What the restrictions between a prefix and the closing point do to it.
#[derive(Default)]
struct Scan {
    /// Restricted names among the objects: (edge depth, name, type).
    opened: Vec<(usize, Name, BaseType)>,
    /// Every restriction binder in the segment: (edge depth, name).
    binders: Vec<(usize, Name)>,
}

/// Scans the restrictions on edges deeper than `above`. Fails when a name of
/// the subject is restricted there.
fn scan(action: &Action, above: usize) -> Option<Scan> {
    let subject: BTreeSet<&Name> = action.subject().iter().filter_map(Value::as_name).collect();
    let objects: BTreeSet<&Name> = action.objects.iter().filter_map(Value::as_name).collect();
    let mut resolved: BTreeSet<Name> = BTreeSet::new();
    let mut out = Scan::default();
    let mut cur = action.cell.clone();
    while let Some(c) = cur {
        if c.depth <= above {
            break;
        }
        if c.step == Step::Restrict {
            for (b, t) in restriction_bindings(&c.node) {
                out.binders.push((c.depth, b.clone()));
                if resolved.contains(b) {
                    continue;
                }
                if subject.contains(b) {
                    return None;
                }
                if objects.contains(b) {
                    out.opened.push((c.depth, b.clone(), t.clone()));
                }
                resolved.insert(b.clone());
            }
        }
        cur = c.parent.clone();
    }
    Some(out)
}

/// Renamings to apply at restriction edges while rebuilding one side.
#[derive(Default)]
struct SidePlan {
    /// Binders removed from their restriction, with the name they carry
    /// outside it.
    opened: HashMap<(usize, Name), Name>,
    /// Binders alpha-renamed in place.
    renamed: HashMap<(usize, Name), Name>,
}

enum LeafOp<'a> {
    Continue,
    Receive(&'a [Value]),
}

fn descend(node: &Arc<Process>, cells: &[Rc<Cell>], plan: &SidePlan, leaf: &LeafOp) -> Process {
    crate::grow(|| {
        let Some((c, rest)) = cells.split_first() else {
            return match (&**node, leaf) {
                (Process::Output { body, .. }, LeafOp::Continue) => (**body).clone(),
                (Process::Input { binders, body, .. }, LeafOp::Receive(values)) => {
                    let sigma: Substitution = binders.iter().cloned().zip(values.iter().cloned()).collect();
                    substitute(body, &sigma)
                }
                _ => unreachable!("leaf does not match its action"),
            };
        };
        match (c.step, &**node) {
            (Step::ParL, Process::Par(l, r)) => Process::Par(Arc::new(descend(l, rest, plan, leaf)), r.clone()),
            (Step::ParR, Process::Par(l, r)) => Process::Par(l.clone(), Arc::new(descend(r, rest, plan, leaf))),
            (Step::Restrict, Process::Restrict { bindings, body }) => {
                let mut kept = Vec::with_capacity(bindings.len());
                let mut sigma = Substitution::new();
                for (b, t) in bindings {
                    let key = (c.depth, b.clone());
                    if let Some(outside) = plan.opened.get(&key) {
                        if outside != b {
                            sigma.insert(b.clone(), Value::Name(outside.clone()));
                        }
                    } else if let Some(fresh) = plan.renamed.get(&key) {
                        sigma.insert(b.clone(), Value::Name(fresh.clone()));
                        kept.push((fresh.clone(), t.clone()));
                    } else {
                        kept.push((b.clone(), t.clone()));
                    }
                }
                let body = subst_arc(body, &sigma);
                Process::restrict(kept, descend(&body, rest, plan, leaf))
            }
            (Step::Repl, Process::Repl(body)) => Process::Par(node.clone(), Arc::new(descend(body, rest, plan, leaf))),
            (Step::Branch(i), Process::Sum(branches)) => descend(&branches[i].1, rest, plan, leaf),
            _ => unreachable!("path does not match the term"),
        }
    })
}

/// Rebuilds the operators above the closing point; nothing there is renamed.
fn rebuild_above(node: &Arc<Process>, cells: &[Rc<Cell>], at_split: &mut dyn FnMut(&Arc<Process>) -> Process) -> Process {
    crate::grow(|| {
        let Some((c, rest)) = cells.split_first() else {
            return at_split(node);
        };
        match (c.step, &**node) {
            (Step::ParL, Process::Par(l, r)) => Process::Par(Arc::new(rebuild_above(l, rest, at_split)), r.clone()),
            (Step::ParR, Process::Par(l, r)) => Process::Par(l.clone(), Arc::new(rebuild_above(r, rest, at_split))),
            (Step::Restrict, Process::Restrict { bindings, body }) => Process::Restrict {
                bindings: bindings.clone(),
                body: Arc::new(rebuild_above(body, rest, at_split)),
            },
            (Step::Repl, Process::Repl(body)) => Process::Par(node.clone(), Arc::new(rebuild_above(body, rest, at_split))),
            (Step::Branch(i), Process::Sum(branches)) => rebuild_above(&branches[i].1, rest, at_split),
            _ => unreachable!("path does not match the term"),
        }
    })
}

/// Decides the outside names of opened binders. A binder keeps its name
/// unless that would capture a free name of the closing point or clash with
/// another binder between the prefix and the closing point.
fn open_plan(scan: &Scan, free_at_split: &BTreeSet<Name>) -> SidePlan {
    let mut plan = SidePlan::default();
    for (depth, b, _) in &scan.opened {
        let clash = free_at_split.contains(b) || scan.binders.iter().any(|(d, n)| n == b && d != depth);
        let outside = if clash { Name::fresh(b) } else { b.clone() };
        plan.opened.insert((*depth, b.clone()), outside);
    }
    plan
}

/// Renames restriction binders of the receiving side that would capture a
/// received name.
fn receive_plan(scan: &Scan, received: &[Value]) -> SidePlan {
    let names: BTreeSet<&Name> = received.iter().filter_map(Value::as_name).collect();
    let mut plan = SidePlan::default();
    for (depth, b) in &scan.binders {
        if names.contains(b) {
            plan.renamed.entry((*depth, b.clone())).or_insert_with(|| Name::fresh(b));
        }
    }
    plan
}

/// Applies the opened renaming to the objects and lists the extruded names
/// in order of first occurrence.
fn extrusion(scan: &Scan, plan: &SidePlan, objects: &[Value]) -> (Vec<Value>, Vec<(Name, BaseType)>) {
    let outside: BTreeMap<&Name, (&Name, &BaseType)> = scan
        .opened
        .iter()
        .map(|(d, b, t)| (b, (&plan.opened[&(*d, b.clone())], t)))
        .collect();
    let mut extruded: Vec<(Name, BaseType)> = Vec::new();
    let objects = objects
        .iter()
        .map(|v| match v.as_name().and_then(|n| outside.get(n)) {
            Some((new, t)) => {
                if !extruded.iter().any(|(n, _)| n == *new) {
                    extruded.push(((*new).clone(), (*t).clone()));
                }
                Value::Name((*new).clone())
            }
            None => v.clone(),
        })
        .collect();
    (objects, extruded)
}

impl Analysis {
    pub fn new(p: &Process) -> Analysis {
        let root = Arc::new(p.clone());
        let mut actions = Vec::new();
        let mut diagnostics = Vec::new();
        collect(&root, None, &mut actions, &mut diagnostics);
        let mut inputs: HashMap<&[Value], Vec<usize>> = HashMap::new();
        for (i, a) in actions.iter().enumerate() {
            if !a.is_output {
                inputs.entry(a.subject()).or_default().push(i);
            }
        }
        let mut taus = Vec::new();
        for (o, out) in actions.iter().enumerate().filter(|(_, a)| a.is_output) {
            let Some(candidates) = inputs.get(out.subject()) else {
                continue;
            };
            for &i in candidates {
                let inp = &actions[i];
                if inp.arity() != out.arity() {
                    continue;
                }
                for site in sites(out, inp) {
                    let above = match site {
                        Site::Par { depth } => depth - 1,
                        Site::Repl { depth } => depth,
                    };
                    if scan(out, above).is_some() && scan(inp, above).is_some() {
                        taus.push(TauSite {
                            output: o,
                            input: i,
                            site,
                        });
                    }
                }
            }
        }
        Analysis {
            root,
            actions,
            taus,
            diagnostics,
        }
    }

    pub fn taus(&self) -> &[TauSite] {
        &self.taus
    }

    pub fn is_quiescent(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn fire(&self, tau: &TauSite) -> Transition {
        let out = &self.actions[tau.output];
        let inp = &self.actions[tau.input];
        let out_cells = cells_of(&out.cell);
        let inp_cells = cells_of(&inp.cell);
        let (common, above) = match tau.site {
            Site::Par { depth } => (depth - 1, depth - 1),
            Site::Repl { depth } => (depth - 1, depth),
        };
        let out_scan = scan(out, above).expect("site was checked");
        let inp_scan = scan(inp, above).expect("site was checked");
        let site = tau.site.clone();
        let target = rebuild_above(&self.root, &out_cells[..common], &mut |node| {
            let free = if out_scan.opened.is_empty() {
                BTreeSet::new()
            } else {
                free_names(node)
            };
            let out_plan = open_plan(&out_scan, &free);
            let (objects, extruded) = extrusion(&out_scan, &out_plan, &out.objects);
            let mut in_plan = receive_plan(&inp_scan, &out.objects);
            for (k, v) in receive_plan(&inp_scan, &objects).renamed {
                in_plan.renamed.entry(k).or_insert(v);
            }
            let leaf = LeafOp::Receive(&objects);
            match (&site, &**node) {
                (Site::Par { depth }, Process::Par(l, r)) => {
                    let o_rest = &out_cells[*depth..];
                    let i_rest = &inp_cells[*depth..];
                    let (nl, nr) = if out_cells[depth - 1].step == Step::ParL {
                        (descend(l, o_rest, &out_plan, &LeafOp::Continue), descend(r, i_rest, &in_plan, &leaf))
                    } else {
                        (descend(l, i_rest, &in_plan, &leaf), descend(r, o_rest, &out_plan, &LeafOp::Continue))
                    };
                    Process::restrict(extruded, Process::par(nl, nr))
                }
                (Site::Repl { depth }, Process::Repl(body)) => {
                    let p1 = descend(body, &out_cells[*depth..], &out_plan, &LeafOp::Continue);
                    let p2 = descend(body, &inp_cells[*depth..], &in_plan, &leaf);
                    Process::Par(node.clone(), Arc::new(Process::restrict(extruded, Process::par(p1, p2))))
                }
                _ => unreachable!("site does not match the term"),
            }
        });
        Transition {
            label: Label::Tau,
            target,
        }
    }

    /// Bound and free outputs to the environment.
    pub fn outputs(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        let mut free: Option<BTreeSet<Name>> = None;
        for a in self.actions.iter().filter(|a| a.is_output) {
            let Some(s) = scan(a, 0) else { continue };
            let free = if s.opened.is_empty() {
                BTreeSet::new()
            } else {
                free.get_or_insert_with(|| free_names(&self.root)).clone()
            };
            let plan = open_plan(&s, &free);
            let (objects, extruded) = extrusion(&s, &plan, &a.objects);
            let target = descend(&self.root, &cells_of(&a.cell), &plan, &LeafOp::Continue);
            out.push(Transition {
                label: Label::Send {
                    subject: a.subject().to_vec(),
                    extruded,
                    objects,
                },
                target,
            });
        }
        out
    }

    /// Early inputs of the given value vectors.
    pub fn inputs(&self, receivable: &[Vec<Value>]) -> Vec<Transition> {
        let mut out = Vec::new();
        for a in self.actions.iter().filter(|a| !a.is_output) {
            let Some(s) = scan(a, 0) else { continue };
            for values in receivable.iter().filter(|v| v.len() == a.arity()) {
                let plan = receive_plan(&s, values);
                let target = descend(&self.root, &cells_of(&a.cell), &plan, &LeafOp::Receive(values));
                out.push(Transition {
                    label: Label::Recv {
                        subject: a.subject().to_vec(),
                        objects: values.clone(),
                    },
                    target,
                });
            }
        }
        out
    }

    pub fn tau_transitions(&self) -> Vec<Transition> {
        self.taus.iter().map(|t| self.fire(t)).collect()
    }
}

/// Closing points for a matching pair: the lowest common ancestor when it is
/// a parallel composition, then every replication above both, innermost first.
fn sites(a: &Action, b: &Action) -> Vec<Site> {
    let (mut x, mut y) = (a.cell.clone(), b.cell.clone());
    if x.is_none() || y.is_none() {
        return Vec::new();
    }
    while depth_of(&x) > depth_of(&y) {
        x = x.and_then(|c| c.parent.clone());
    }
    while depth_of(&y) > depth_of(&x) {
        y = y.and_then(|c| c.parent.clone());
    }
    // One of the actions sits on the other's path only if it is the root.
    if same_cell(&x, &y) {
        return Vec::new();
    }
    loop {
        let (cx, cy) = (x.clone().expect("distinct leaves"), y.clone().expect("distinct leaves"));
        if same_cell(&cx.parent, &cy.parent) {
            break;
        }
        x = cx.parent.clone();
        y = cy.parent.clone();
    }
    let split = x.expect("distinct leaves");
    let mut out = Vec::new();
    if matches!(&*split.node, Process::Par(..)) {
        out.push(Site::Par { depth: split.depth });
    }
    let mut cur = split.parent.clone();
    while let Some(c) = cur {
        if c.step == Step::Repl {
            out.push(Site::Repl { depth: c.depth });
        }
        cur = c.parent.clone();
    }
    out
}

/// All transitions of `p`: communications, outputs, and inputs of the
/// vectors in `receivable`.
pub fn transitions(p: &Process, receivable: &[Vec<Value>]) -> TransitionSet {
    let analysis = Analysis::new(p);
    let mut transitions = analysis.tau_transitions();
    transitions.extend(analysis.outputs());
    transitions.extend(analysis.inputs(receivable));
    TransitionSet {
        transitions,
        diagnostics: analysis.diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epi::parse::parse_process;
    use crate::epi::subst::alpha_eq;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn taus(src: &str) -> Vec<Process> {
        transitions(&p(src), &[])
            .transitions
            .into_iter()
            .filter(|t| t.label.is_tau())
            .map(|t| t.target)
            .collect()
    }

    #[test]
    fn free_output_evaluates_objects() {
        let ts = transitions(&p("x!(2+3).0"), &[]);
        assert_eq!(ts.transitions.len(), 1);
        let t = &ts.transitions[0];
        assert_eq!(
            t.label,
            Label::Send {
                subject: vec![Value::name("x")],
                extruded: vec![],
                objects: vec![Value::Int(5)],
            }
        );
        assert_eq!(t.target, Process::Nil);
    }

    #[test]
    fn communication_substitutes() {
        let ts = taus("x!(5).0 | x?(y).y!(1).0");
        let expected = Process::par(
            Process::Nil,
            Process::output(vec![Value::Int(5)], vec![crate::epi::syntax::Expr::int(1)], Process::Nil),
        );
        assert_eq!(ts, vec![expected]);
    }

    #[test]
    fn bound_output_opens_restriction() {
        let ts = transitions(&p("new z:I (x!(z).0)"), &[]);
        assert_eq!(ts.transitions.len(), 1);
        assert_eq!(
            ts.transitions[0].label,
            Label::Send {
                subject: vec![Value::name("x")],
                extruded: vec![(Name::new("z"), BaseType::named("I"))],
                objects: vec![Value::name("z")],
            }
        );
        assert_eq!(ts.transitions[0].target, Process::Nil);
    }

    #[test]
    fn restricted_subject_blocks_output() {
        assert!(transitions(&p("new x:I (x!(1))"), &[]).transitions.is_empty());
        // but communication inside the restriction is fine
        assert_eq!(taus("new x:I (x!(1) | x?(y))").len(), 1);
    }

    #[test]
    fn close_extends_scope() {
        let ts = taus("new z:I (x!(z).z!()) | x?(y).y?()");
        assert_eq!(ts.len(), 1);
        assert!(alpha_eq(&ts[0], &p("new z:I (z!() | z?())")));
        let next = taus(&ts[0].to_string());
        assert_eq!(next.len(), 1);
    }

    #[test]
    fn close_avoids_capturing_free_names() {
        // the receiver mentions a different, free z
        let ts = taus("new z:I (x!(z)) | x?(y).y!(z)");
        assert_eq!(ts.len(), 1);
        assert!(alpha_eq(&ts[0], &p("new w:I (0 | w!(z))")));
    }

    #[test]
    fn receiver_restrictions_are_renamed() {
        let ts = taus("x!(z) | new z:I (x?(y).y!(z))");
        assert_eq!(ts.len(), 1);
        assert!(alpha_eq(&ts[0], &p("0 | new w:I (z!(w))")));
    }

    #[test]
    fn sum_fires_true_branches_only() {
        let ts = taus("[true] x!(1) + [false] y!(1) | x?(z) | y?(z)");
        assert_eq!(ts, vec![p("0 | 0 | y?(z)")]);
    }

    #[test]
    fn ill_sorted_guard_is_a_diagnostic() {
        let ts = transitions(&p("[1 + 1] x!()"), &[]);
        assert!(ts.transitions.is_empty());
        assert_eq!(ts.diagnostics.len(), 1);
    }

    #[test]
    fn replication_unfolds_one_copy() {
        let ts = taus("!x?(y).y!() | x!(a)");
        assert_eq!(ts, vec![p("(!x?(y).y!() | a!()) | 0")]);
        assert!(taus("!(x?().x!().0)").is_empty());
    }

    #[test]
    fn replication_copies_communicate() {
        let ts = taus("!(x!(a) | x?(y).y!())");
        // one copy talking to itself, and two copies talking to each other
        assert_eq!(ts.len(), 2);
        assert!(ts.contains(&p("!(x!(a) | x?(y).y!()) | (0 | a!())")));
        assert!(ts.contains(&p("!(x!(a) | x?(y).y!()) | ((0 | x?(y).y!()) | (x!(a) | a!()))")));
    }

    #[test]
    fn replicated_bound_output_closes_with_fresh_scope() {
        let ts = taus("!new z:I (x!(z)) | x?(y).y!()");
        assert_eq!(ts.len(), 1);
        assert!(alpha_eq(&ts[0], &p("new z:I (!new z:I (x!(z)) | 0 | z!())")));
    }

    #[test]
    fn early_inputs_use_receivable() {
        let ts = transitions(&p("x?(y).y!()"), &[vec![Value::name("a")], vec![Value::Int(1), Value::Int(2)]]);
        assert_eq!(ts.transitions.len(), 1);
        assert_eq!(ts.transitions[0].target, p("a!()"));
    }

    #[test]
    fn arity_mismatch_is_stuck() {
        assert!(taus("x!(1, 2) | x?(y)").is_empty());
    }

    #[test]
    fn polyadic_subjects_match_exactly() {
        assert_eq!(taus("x*y!(1) | x*y?(a)").len(), 1);
        assert!(taus("x*y!(1) | y*x?(a)").is_empty());
        assert!(taus("x*y!(1) | x?(a)").is_empty());
    }

    #[test]
    fn commuted_parallel_gives_swapped_target() {
        let a = taus("x!(5) | x?(y).y!()");
        let b = taus("x?(y).y!() | x!(5)");
        assert_eq!(a.len(), 1);
        assert_eq!(b.len(), 1);
        match (&a[0], &b[0]) {
            (Process::Par(l1, r1), Process::Par(l2, r2)) => {
                assert_eq!(l1, r2);
                assert_eq!(r1, l2);
            }
            _ => panic!("expected parallel targets"),
        }
    }
}
