//! Generation of well-typed, terminating WC programs.
//!
//! Every class implements every member of its interface. Method names are
//! globally ranked and a body only calls lower-ranked methods; loops count
//! a variable the body never assigns. Both together bound every run.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epi::{BaseType, Name, Operator, TypeName, Value};
use crate::wc::{ClassDecl, InterfaceDecl, MethodDecl, WcExpr, WcProgram, WcStm};

struct Iface {
    name: TypeName,
    fields: Vec<(Name, BaseType)>,
    methods: Vec<(Name, Vec<BaseType>, usize)>,
    classes: Vec<Name>,
}

/// Variables in scope, and whether the generator may assign them.
#[derive(Clone, Default)]
struct Scope {
    vars: Vec<(Name, BaseType, bool)>,
    this: Option<TypeName>,
    /// Only methods of lower rank may be called.
    rank: usize,
}

pub struct WcGenerator {
    rng: ChaCha8Rng,
    ifaces: Vec<Iface>,
    next: usize,
}

const MAX_STM_DEPTH: usize = 3;

impl WcGenerator {
    pub fn new(seed: u64) -> WcGenerator {
        WcGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ifaces: Vec::new(),
            next: 0,
        }
    }

    fn fresh(&mut self, stem: &str) -> Name {
        self.next += 1;
        Name::new(format!("{stem}{}", self.next))
    }

    fn base_type(&mut self) -> BaseType {
        let k = self.ifaces.len();
        match self.rng.gen_range(0..5) {
            0 | 1 => BaseType::Int,
            2 | 3 => BaseType::Bool,
            _ => BaseType::Named(self.ifaces[self.rng.gen_range(0..k)].name.clone()),
        }
    }

    fn iface(&self, i: &TypeName) -> &Iface {
        self.ifaces.iter().find(|f| &f.name == i).expect("declared interface")
    }

    fn literal(&mut self, ty: &BaseType) -> Value {
        match ty {
            BaseType::Int => Value::Int(self.rng.gen_range(-2..6)),
            BaseType::Bool => Value::Bool(self.rng.gen_bool(0.5)),
            BaseType::Named(i) => {
                let classes = self.iface(i).classes.clone();
                Value::Name(classes.choose(&mut self.rng).expect("every interface has a class").clone())
            }
        }
    }

    /// Expressions of interface type that can be used as a field base or
    /// call target.
    fn objects(&mut self, scope: &Scope) -> Vec<(WcExpr, TypeName)> {
        let mut out = Vec::new();
        for f in &self.ifaces {
            for c in &f.classes {
                out.push((WcExpr::Val(Value::Name(c.clone())), f.name.clone()));
            }
        }
        for (x, t, _) in &scope.vars {
            if let BaseType::Named(i) = t {
                out.push((WcExpr::Var(x.clone()), i.clone()));
            }
        }
        if let Some(i) = &scope.this {
            out.push((WcExpr::This, i.clone()));
        }
        out
    }

    fn expr(&mut self, scope: &Scope, ty: &BaseType, depth: usize) -> WcExpr {
        crate::grow(|| {
            let roll = self.rng.gen_range(0..10);
            let vars: Vec<Name> = scope.vars.iter().filter(|(_, t, _)| t == ty).map(|(x, _, _)| x.clone()).collect();
            if roll < 3 && !vars.is_empty() {
                return WcExpr::Var(vars.choose(&mut self.rng).expect("non-empty").clone());
            }
            if roll < 5 {
                let objects = self.objects(scope);
                let with_field: Vec<(WcExpr, Name)> = objects
                    .into_iter()
                    .flat_map(|(e, i)| {
                        self.iface(&i)
                            .fields
                            .iter()
                            .filter(|(_, t)| t == ty)
                            .map(|(p, _)| (e.clone(), p.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                if let Some((base, p)) = with_field.choose(&mut self.rng) {
                    return WcExpr::Field(Box::new(base.clone()), p.clone());
                }
            }
            if roll < 8 && depth > 0 {
                match ty {
                    BaseType::Int => {
                        let op = *[Operator::Add, Operator::Sub].choose(&mut self.rng).expect("non-empty");
                        return WcExpr::op(op, vec![self.expr(scope, ty, depth - 1), self.expr(scope, ty, depth - 1)]);
                    }
                    BaseType::Bool => {
                        return match self.rng.gen_range(0..4) {
                            0 => WcExpr::op(
                                Operator::Lt,
                                vec![self.expr(scope, &BaseType::Int, depth - 1), self.expr(scope, &BaseType::Int, depth - 1)],
                            ),
                            1 => {
                                let sort = self.base_type();
                                WcExpr::op(Operator::Eq, vec![self.expr(scope, &sort, depth - 1), self.expr(scope, &sort, depth - 1)])
                            }
                            2 => WcExpr::op(Operator::Not, vec![self.expr(scope, ty, depth - 1)]),
                            _ => {
                                let op = *[Operator::And, Operator::Or].choose(&mut self.rng).expect("non-empty");
                                WcExpr::op(op, vec![self.expr(scope, ty, depth - 1), self.expr(scope, ty, depth - 1)])
                            }
                        };
                    }
                    BaseType::Named(_) => {}
                }
            }
            if let (BaseType::Named(i), Some(this)) = (ty, &scope.this) {
                if i == this && self.rng.gen_bool(0.3) {
                    return WcExpr::This;
                }
            }
            WcExpr::Val(self.literal(ty))
        })
    }

    fn call(&mut self, scope: &Scope) -> Option<WcStm> {
        let objects = self.objects(scope);
        let mut candidates = Vec::new();
        for (e, i) in objects {
            for (m, params, rank) in &self.iface(&i).methods {
                if *rank < scope.rank {
                    candidates.push((e.clone(), m.clone(), params.clone()));
                }
            }
        }
        let (target, method, params) = candidates.choose(&mut self.rng)?.clone();
        let args = params.iter().map(|b| self.expr(scope, b, 1)).collect();
        Some(WcStm::Call { target, method, args })
    }

    fn stm(&mut self, scope: &Scope, depth: usize) -> WcStm {
        crate::grow(|| {
            let choice = if depth == 0 { self.rng.gen_range(0..4) } else { self.rng.gen_range(0..9) };
            match choice {
                0 => WcStm::Skip,
                1 => {
                    let assignable: Vec<(Name, BaseType)> =
                        scope.vars.iter().filter(|(_, _, w)| *w).map(|(x, t, _)| (x.clone(), t.clone())).collect();
                    match assignable.choose(&mut self.rng) {
                        Some((x, t)) => {
                            let (x, t) = (x.clone(), t.clone());
                            WcStm::AssignVar(x, self.expr(scope, &t, 2))
                        }
                        None => WcStm::Skip,
                    }
                }
                2 => match &scope.this {
                    Some(i) => {
                        let fields = self.iface(i).fields.clone();
                        match fields.choose(&mut self.rng) {
                            Some((p, t)) => WcStm::AssignField(p.clone(), self.expr(scope, t, 2)),
                            None => WcStm::Skip,
                        }
                    }
                    None => WcStm::Skip,
                },
                3 => self.call(scope).unwrap_or(WcStm::Skip),
                4 | 5 => WcStm::seq(self.stm(scope, depth - 1), self.stm(scope, depth - 1)),
                6 => {
                    let ty = self.base_type();
                    let init = self.expr(scope, &ty, 2);
                    let x = self.fresh("x");
                    let mut inner = scope.clone();
                    inner.vars.push((x.clone(), ty.clone(), true));
                    WcStm::VarDecl {
                        var: x,
                        ty,
                        init,
                        body: Box::new(self.stm(&inner, depth - 1)),
                    }
                }
                7 => {
                    let c = self.expr(scope, &BaseType::Bool, 2);
                    WcStm::if_(c, self.stm(scope, depth - 1), self.stm(scope, depth - 1))
                }
                _ => {
                    let k = self.fresh("k");
                    let bound = self.rng.gen_range(0..=3);
                    let mut inner = scope.clone();
                    inner.vars.push((k.clone(), BaseType::Int, false));
                    let body = self.stm(&inner, depth - 1);
                    let step = WcStm::AssignVar(k.clone(), WcExpr::op(Operator::Add, vec![WcExpr::Var(k.clone()), WcExpr::int(1)]));
                    let cond = WcExpr::op(Operator::Lt, vec![WcExpr::Var(k.clone()), WcExpr::int(bound)]);
                    WcStm::VarDecl {
                        var: k,
                        ty: BaseType::Int,
                        init: WcExpr::int(0),
                        body: Box::new(WcStm::while_(cond, WcStm::seq(body, step))),
                    }
                }
            }
        })
    }

    /// A well-typed program whose run terminates without getting stuck.
    pub fn program(&mut self) -> WcProgram {
        self.ifaces.clear();
        let n_ifaces = self.rng.gen_range(1..=3);
        for _ in 0..n_ifaces {
            let name = TypeName::new(self.fresh("I").as_str());
            self.ifaces.push(Iface {
                name,
                fields: Vec::new(),
                methods: Vec::new(),
                classes: Vec::new(),
            });
        }
        for k in 0..n_ifaces {
            for _ in 0..self.rng.gen_range(1..=2) {
                let c = self.fresh("C");
                self.ifaces[k].classes.push(c);
            }
        }
        let mut rank = 0;
        for k in 0..n_ifaces {
            for _ in 0..self.rng.gen_range(0..=2) {
                let (p, t) = (self.fresh("p"), self.base_type());
                self.ifaces[k].fields.push((p, t));
            }
            for _ in 0..self.rng.gen_range(0..=2) {
                let m = self.fresh("m");
                let params = (0..self.rng.gen_range(0..=2)).map(|_| self.base_type()).collect();
                rank += 1;
                self.ifaces[k].methods.push((m, params, rank));
            }
        }
        let mut classes = Vec::new();
        for k in 0..n_ifaces {
            let (iname, fields, methods, cnames) = {
                let f = &self.ifaces[k];
                (f.name.clone(), f.fields.clone(), f.methods.clone(), f.classes.clone())
            };
            for c in cnames {
                let fields = fields.iter().map(|(p, t)| (p.clone(), self.literal(t))).collect();
                let mut decls = Vec::new();
                for (m, ptypes, r) in &methods {
                    let params: Vec<Name> = ptypes.iter().map(|_| self.fresh("a")).collect();
                    let scope = Scope {
                        vars: params.iter().cloned().zip(ptypes.iter().cloned()).map(|(x, t)| (x, t, true)).collect(),
                        this: Some(iname.clone()),
                        rank: *r,
                    };
                    let body = self.stm(&scope, MAX_STM_DEPTH);
                    decls.push(MethodDecl {
                        name: m.clone(),
                        params,
                        body,
                    });
                }
                classes.push(ClassDecl {
                    name: c,
                    iface: iname.clone(),
                    fields,
                    methods: decls,
                });
            }
        }
        let main_scope = Scope {
            rank: rank + 1,
            ..Scope::default()
        };
        let mut parts = vec![self.stm(&main_scope, MAX_STM_DEPTH)];
        for _ in 0..self.rng.gen_range(1..=3) {
            parts.extend(self.call(&main_scope));
        }
        parts.shuffle(&mut self.rng);
        let main = WcStm::seq_all(parts);
        let interfaces = self
            .ifaces
            .iter()
            .map(|f| InterfaceDecl {
                name: f.name.clone(),
                fields: f.fields.clone(),
                methods: f.methods.iter().map(|(m, ps, _)| (m.clone(), ps.clone())).collect(),
            })
            .collect();
        WcProgram {
            interfaces,
            classes,
            main,
        }
    }
}

/// Applies `f` to every expression slot of a statement, in order.
fn for_each_slot(s: &mut WcStm, f: &mut impl FnMut(&mut WcExpr)) {
    crate::grow(|| match s {
        WcStm::Skip => {}
        WcStm::VarDecl { init, body, .. } => {
            f(init);
            for_each_slot(body, f);
        }
        WcStm::AssignVar(_, e) | WcStm::AssignField(_, e) => f(e),
        WcStm::Seq(a, b) => {
            for_each_slot(a, f);
            for_each_slot(b, f);
        }
        WcStm::If(c, t, e) => {
            f(c);
            for_each_slot(t, f);
            for_each_slot(e, f);
        }
        WcStm::While(c, body) => {
            f(c);
            for_each_slot(body, f);
        }
        WcStm::Call { target, args, .. } => {
            f(target);
            args.iter_mut().for_each(&mut *f);
        }
    })
}

fn for_each_program_slot(p: &mut WcProgram, f: &mut impl FnMut(&mut WcExpr)) {
    for_each_slot(&mut p.main, f);
    for c in &mut p.classes {
        for m in &mut c.methods {
            for_each_slot(&mut m.body, f);
        }
    }
}

/// Every expression occurring directly in a statement of `p`.
pub fn statement_expressions(p: &WcProgram) -> Vec<WcExpr> {
    let mut q = p.clone();
    let mut out = Vec::new();
    for_each_program_slot(&mut q, &mut |e| out.push(e.clone()));
    out
}

/// `p` with one expression in a statement replaced by a random literal or
/// class name. The result is often, but not always, ill-typed.
pub fn inject_error(p: &WcProgram, seed: u64) -> WcProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = p.clone();
    let mut count = 0;
    for_each_program_slot(&mut q, &mut |_| count += 1);
    if count == 0 {
        return q;
    }
    let mut replacements = vec![WcExpr::int(rng.gen_range(0..4)), WcExpr::bool(rng.gen_bool(0.5))];
    replacements.extend(p.classes.iter().map(|c| WcExpr::Val(Value::Name(c.name.clone()))));
    let replacement = replacements.choose(&mut rng).expect("non-empty").clone();
    let target = rng.gen_range(0..count);
    let mut i = 0;
    for_each_program_slot(&mut q, &mut |e| {
        if i == target {
            *e = replacement.clone();
        }
        i += 1;
    });
    q
}
