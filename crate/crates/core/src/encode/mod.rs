//! The WC to epi compiler.
//!
//! Mutable cells follow the reference-cell protocol: a cell is a single
//! floating output on its location, read and written by an input followed
//! by a fresh output. Statements signal completion on a return name.
//! Auxiliary names and container type names start with `$`, which source
//! programs cannot use.

pub mod check;
pub mod decode;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::epi::{BaseType, Expr, Name, Process, TreeType, TypeEnv, TypeName, Value};
use crate::wc::env::{build_environments, this_name, EnvS, EnvT, EnvV};
use crate::wc::types::{gamma_of, WcType, WcTypeEnv};
use crate::wc::{WcExpr, WcProgram, WcStm};

pub use check::{agree, correspond, AgreeReport, AgreeVerdict, CorrespondReport, CorrespondVerdict};
pub use decode::{decode_fields, has_terminated, prune, DecodeError};

pub const RET_TYPE: &str = "$Ret";

/// `$Ref_B`, the type of a cell holding a `B`.
pub fn ref_type_name(b: &BaseType) -> TypeName {
    TypeName::new(format!("$Ref_{b}"))
}

/// `$Proc_B1_.._Bn`, the type of a method channel taking `B̃`.
pub fn proc_type_name(params: &[BaseType]) -> TypeName {
    let mut s = String::from("$Proc");
    for b in params {
        s.push('_');
        s.push_str(&b.to_string());
    }
    TypeName::new(s)
}

/// `$Mem_m`, the type of the member name `m`.
pub fn member_type_name(m: &Name) -> TypeName {
    TypeName::new(format!("$Mem_{m}"))
}

fn ret_type() -> BaseType {
    BaseType::Named(TypeName::new(RET_TYPE))
}

fn ref_type(b: &BaseType) -> BaseType {
    BaseType::Named(ref_type_name(b))
}

fn name_val(n: &Name) -> Value {
    Value::Name(n.clone())
}

fn name_expr(n: &Name) -> Expr {
    Expr::Val(Value::Name(n.clone()))
}

/// `new ℓ:$Ref_B (ℓ!(e) | P)`
pub fn loc_new(l: &Name, b: &BaseType, e: Expr, p: Process) -> Process {
    Process::restrict(
        vec![(l.clone(), ref_type(b))],
        Process::par(Process::output(vec![name_val(l)], vec![e], Process::Nil), p),
    )
}

/// `ℓ?(y).(ℓ!(y) | P)` for a location vector `ℓ`.
pub fn loc_read(l: &[Value], y: &Name, p: Process) -> Process {
    Process::input(
        l.to_vec(),
        vec![y.clone()],
        Process::par(Process::output(l.to_vec(), vec![name_expr(y)], Process::Nil), p),
    )
}

/// `ℓ?(w).(ℓ!(e) | P)` where `w` does not occur in `P` or `e`.
pub fn loc_write(l: &[Value], w: &Name, e: Expr, p: Process) -> Process {
    Process::input(
        l.to_vec(),
        vec![w.clone()],
        Process::par(Process::output(l.to_vec(), vec![e], Process::Nil), p),
    )
}

/// A translation clause needs a type that the program does not provide.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("untranslatable: {0}")]
pub struct Untranslatable(pub String);

/// A process context of nested cell declarations with one hole innermost.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProcessContext {
    /// Outermost first.
    pub cells: Vec<(Name, BaseType, Value)>,
}

impl ProcessContext {
    pub fn fill(&self, p: Process) -> Process {
        self.cells
            .iter()
            .rev()
            .fold(p, |acc, (x, b, v)| loc_new(x, b, Expr::Val(v.clone()), acc))
    }
}

/// The result of compiling a program or configuration.
#[derive(Clone, Debug)]
pub struct CompilationUnit {
    pub process: Process,
    pub gamma: TypeEnv,
    /// Each field of each class, with the subject of its cell.
    pub decoder: BTreeMap<(Name, Name), Vec<Value>>,
    /// The top-level return name.
    pub ret: Name,
}

impl CompilationUnit {
    /// The decoder map as `{"A.p": "A*p"}`.
    pub fn decoder_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .decoder
            .iter()
            .map(|((a, p), subject)| {
                let s: Vec<String> = subject.iter().map(|v| v.to_string()).collect();
                (format!("{a}.{p}"), serde_json::Value::String(s.join("*")))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// The type of an expression where one can be read off, without checking
/// the expression itself. Used for the annotations on minted cells.
pub fn annotation(gamma: &WcTypeEnv, e: &WcExpr) -> Option<BaseType> {
    match e {
        WcExpr::Val(Value::Int(_)) => Some(BaseType::Int),
        WcExpr::Val(Value::Bool(_)) => Some(BaseType::Bool),
        WcExpr::Val(Value::Name(a)) => gamma.names.get(a).cloned(),
        WcExpr::Var(x) => gamma.names.get(x).cloned(),
        WcExpr::This => gamma.names.get(&this_name()).cloned(),
        WcExpr::Field(base, p) => match annotation(gamma, base)? {
            BaseType::Named(i) => match gamma.member(&i, p)? {
                WcType::Base(b) => Some(b.clone()),
                _ => None,
            },
            _ => None,
        },
        WcExpr::Op(op, _) => Some(op.result_sort()),
    }
}

/// Mints names and records the container types used.
pub struct Encoder {
    next: u64,
    used: BTreeSet<BaseType>,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder {
            next: 0,
            used: BTreeSet::new(),
        }
    }

    fn mint(&mut self, stem: &str) -> Name {
        self.next += 1;
        Name::new(format!("${stem}{}", self.next))
    }

    fn cell_type(&mut self, b: &BaseType) -> BaseType {
        self.used.insert(b.clone());
        ref_type(b)
    }

    fn annotate(&mut self, gamma: &WcTypeEnv, e: &WcExpr) -> Result<BaseType, Untranslatable> {
        let b = annotation(gamma, e).ok_or_else(|| Untranslatable(format!("no type can be read off `{e}`")))?;
        self.used.insert(b.clone());
        Ok(b)
    }

    /// `⟦e⟧(z)`: delivers the value of `e` on `z`.
    pub fn expr(&mut self, e: &WcExpr, z: &Name, gamma: &WcTypeEnv) -> Result<Process, Untranslatable> {
        crate::grow(|| match e {
            WcExpr::Val(v) => Ok(Process::output(vec![name_val(z)], vec![Expr::Val(v.clone())], Process::Nil)),
            WcExpr::Var(x) => Ok(self.read_var(x, z)),
            WcExpr::This => Ok(self.read_var(&this_name(), z)),
            WcExpr::Field(base, p) => {
                let b = self.annotate(gamma, base)?;
                let t = self.cell_type(&b);
                let z1 = self.mint("z");
                let big_y = self.mint("Y");
                let y = self.mint("y");
                let inner = self.expr(base, &z1, gamma)?;
                let cell = vec![name_val(&big_y), name_val(p)];
                let read = loc_read(&cell, &y, Process::output(vec![name_val(z)], vec![name_expr(&y)], Process::Nil));
                Ok(Process::restrict(
                    vec![(z1.clone(), t)],
                    Process::par(inner, Process::input(vec![name_val(&z1)], vec![big_y], read)),
                ))
            }
            WcExpr::Op(op, args) => {
                let mut cells = Vec::new();
                let mut parts = Vec::new();
                for a in args {
                    let b = self.annotate(gamma, a)?;
                    let t = self.cell_type(&b);
                    let zi = self.mint("z");
                    parts.push(self.expr(a, &zi, gamma)?);
                    cells.push((zi, t));
                }
                let ys: Vec<Name> = args.iter().map(|_| self.mint("y")).collect();
                let result = Expr::Op(*op, ys.iter().map(name_expr).collect());
                let mut join = Process::output(vec![name_val(z)], vec![result], Process::Nil);
                for ((zi, _), yi) in cells.iter().zip(&ys).rev() {
                    join = Process::input(vec![name_val(zi)], vec![yi.clone()], join);
                }
                parts.push(join);
                Ok(Process::restrict(cells, Process::par_all(parts)))
            }
        })
    }

    /// `x?(y).(x!(y) | z!(y))`
    fn read_var(&mut self, x: &Name, z: &Name) -> Process {
        let y = self.mint("y");
        loc_read(
            &[name_val(x)],
            &y,
            Process::output(vec![name_val(z)], vec![name_expr(&y)], Process::Nil),
        )
    }

    fn signal(r: &Name) -> Process {
        Process::output(vec![name_val(r)], vec![], Process::Nil)
    }

    /// Evaluates `e` into a fresh cell of type `$Ref_B`, then continues with
    /// `k(y)` where `y` holds the value.
    fn with_value(
        &mut self,
        e: &WcExpr,
        b: &BaseType,
        gamma: &WcTypeEnv,
        k: impl FnOnce(&mut Self, &Name) -> Result<Process, Untranslatable>,
    ) -> Result<Process, Untranslatable> {
        let t = self.cell_type(b);
        let z = self.mint("z");
        let y = self.mint("y");
        let eval = self.expr(e, &z, gamma)?;
        let rest = k(self, &y)?;
        Ok(Process::restrict(
            vec![(z.clone(), t)],
            Process::par(eval, Process::input(vec![name_val(&z)], vec![y], rest)),
        ))
    }

    /// `⟦S⟧(r)`: runs `S` and then signals on `r`.
    pub fn stm(&mut self, s: &WcStm, r: &Name, gamma: &WcTypeEnv) -> Result<Process, Untranslatable> {
        crate::grow(|| match s {
            WcStm::Skip => Ok(Self::signal(r)),
            WcStm::VarDecl { var, ty, init, body } => {
                let inner = gamma.clone().with_name(var.clone(), ty.clone());
                self.with_value(init, ty, gamma, |enc, y| {
                    let body = enc.stm(body, r, &inner)?;
                    Ok(loc_new(var, ty, name_expr(y), body))
                })
            }
            WcStm::AssignVar(x, e) => {
                let b = self.annotate(gamma, e)?;
                self.with_value(e, &b, gamma, |enc, y| {
                    let w = enc.mint("w");
                    Ok(loc_write(&[name_val(x)], &w, name_expr(y), Self::signal(r)))
                })
            }
            WcStm::AssignField(p, e) => {
                let b = self.annotate(gamma, e)?;
                self.with_value(e, &b, gamma, |enc, y| {
                    let big_y = enc.mint("Y");
                    let w = enc.mint("w");
                    let cell = vec![name_val(&big_y), name_val(p)];
                    let write = loc_write(&cell, &w, name_expr(y), Self::signal(r));
                    Ok(loc_read(&[name_val(&this_name())], &big_y, write))
                })
            }
            WcStm::Seq(a, b) => {
                let r1 = self.mint("r");
                let first = self.stm(a, &r1, gamma)?;
                let second = self.stm(b, r, gamma)?;
                Ok(Process::restrict(
                    vec![(r1.clone(), ret_type())],
                    Process::par(first, Process::input(vec![name_val(&r1)], vec![], second)),
                ))
            }
            WcStm::If(c, t, e) => self.with_value(c, &BaseType::Bool, gamma, |enc, y| {
                let t = enc.stm(t, r, gamma)?;
                let e = enc.stm(e, r, gamma)?;
                Ok(Process::if_then_else(name_expr(y), t, e))
            }),
            WcStm::While(c, body) => {
                let r1 = self.mint("r");
                let step = self.with_value(c, &BaseType::Bool, gamma, |enc, y| {
                    let again = enc.stm(body, &r1, gamma)?;
                    Ok(Process::if_then_else(name_expr(y), again, Self::signal(r)))
                })?;
                Ok(Process::restrict(
                    vec![(r1.clone(), ret_type())],
                    Process::par(
                        Self::signal(&r1),
                        Process::repl(Process::input(vec![name_val(&r1)], vec![], step)),
                    ),
                ))
            }
            WcStm::Call { target, method, args } => {
                let bt = self.annotate(gamma, target)?;
                let a = self.mint("a");
                let mut cells = vec![(a.clone(), self.cell_type(&bt))];
                let mut parts = vec![self.expr(target, &a, gamma)?];
                for e in args {
                    let b = self.annotate(gamma, e)?;
                    let t = self.cell_type(&b);
                    let zi = self.mint("z");
                    parts.push(self.expr(e, &zi, gamma)?);
                    cells.push((zi, t));
                }
                let big_y = self.mint("Y");
                let ys: Vec<Name> = args.iter().map(|_| self.mint("y")).collect();
                let mut objects = vec![name_expr(r)];
                objects.extend(ys.iter().map(name_expr));
                let mut chain = Process::output(vec![name_val(&big_y), name_val(method)], objects, Process::Nil);
                for ((zi, _), yi) in cells[1..].iter().zip(&ys).rev() {
                    chain = Process::input(vec![name_val(zi)], vec![yi.clone()], chain);
                }
                parts.push(Process::input(vec![name_val(&a)], vec![big_y], chain));
                Ok(Process::restrict(cells, Process::par_all(parts)))
            }
        })
    }

    /// `⟦envF⟧(A)`: one plain output per field.
    pub fn fields(&mut self, a: &Name, fields: &[(Name, Value)]) -> Process {
        match fields.split_first() {
            None => Process::Nil,
            Some(((p, v), rest)) => Process::par(
                self.fields(a, rest),
                Process::output(vec![name_val(a), name_val(p)], vec![Expr::Val(v.clone())], Process::Nil),
            ),
        }
    }

    /// `⟦envS⟧`
    pub fn store(&mut self, env_s: &EnvS) -> Process {
        self.store_from(&env_s.entries)
    }

    fn store_from(&mut self, entries: &[(Name, crate::wc::EnvF)]) -> Process {
        match entries.split_first() {
            None => Process::Nil,
            Some(((a, f), rest)) => {
                let tail = self.store_from(rest);
                Process::par(tail, self.fields(a, &f.entries))
            }
        }
    }

    /// `⟦envM⟧(A)`: a replicated input per method.
    pub fn methods(
        &mut self,
        a: &Name,
        methods: &[(Name, crate::wc::MethodBody)],
        gamma: &WcTypeEnv,
    ) -> Result<Process, Untranslatable> {
        let Some(((f, m), rest)) = methods.split_first() else {
            return Ok(Process::Nil);
        };
        let tail = self.methods(a, rest, gamma)?;
        let iface = match gamma.names.get(a) {
            Some(BaseType::Named(i)) => i.clone(),
            _ => return Err(Untranslatable(format!("class {a} has no interface"))),
        };
        let params = match gamma.member(&iface, f) {
            Some(WcType::Proc(bs)) if bs.len() == m.params.len() => bs.clone(),
            _ => {
                return Err(Untranslatable(format!(
                    "interface {iface} gives no signature for {a}::{f} with {} parameters",
                    m.params.len()
                )))
            }
        };
        let mut inner = gamma.clone().with_name(this_name(), BaseType::Named(iface.clone()));
        for (x, b) in m.params.iter().zip(&params) {
            inner.names.insert(x.clone(), b.clone());
        }
        let r = self.mint("r");
        let actuals: Vec<Name> = m.params.iter().map(|_| self.mint("a")).collect();
        let this_t = BaseType::Named(iface);
        self.used.insert(this_t.clone());
        let mut body = loc_new(&this_name(), &this_t, name_expr(a), self.stm(&m.body, &r, &inner)?);
        for ((x, b), ai) in m.params.iter().zip(&params).zip(&actuals).rev() {
            self.used.insert(b.clone());
            body = loc_new(x, b, name_expr(ai), body);
        }
        let mut binders = vec![r];
        binders.extend(actuals);
        let server = Process::repl(Process::input(vec![name_val(a), name_val(f)], binders, body));
        Ok(Process::par(tail, server))
    }

    /// `⟦envT⟧`
    pub fn method_table(&mut self, env_t: &EnvT, gamma: &WcTypeEnv) -> Result<Process, Untranslatable> {
        let mut out = Process::Nil;
        for (a, m) in env_t.entries.iter().rev() {
            out = Process::par(out, self.methods(a, &m.entries, gamma)?);
        }
        Ok(out)
    }

    /// `⟦envV⟧` as a context of cell declarations.
    pub fn locals(&mut self, env_v: &EnvV, gamma: &WcTypeEnv) -> Result<ProcessContext, Untranslatable> {
        let mut cells = Vec::new();
        for (x, v) in env_v.iter() {
            let b = gamma
                .names
                .get(x)
                .cloned()
                .ok_or_else(|| Untranslatable(format!("variable {x} has no type")))?;
            self.used.insert(b.clone());
            cells.push((x.clone(), b, v.clone()));
        }
        Ok(ProcessContext { cells })
    }
}

fn store_types(env_s: &EnvS, gamma: &WcTypeEnv, used: &mut BTreeSet<BaseType>) {
    for (_, f) in env_s.iter() {
        for (_, v) in f.iter() {
            match v {
                Value::Int(_) => used.insert(BaseType::Int),
                Value::Bool(_) => used.insert(BaseType::Bool),
                Value::Name(a) => match gamma.names.get(a) {
                    Some(b) => used.insert(b.clone()),
                    None => false,
                },
            };
        }
    }
}

/// `⟦Γ⟧`, with a container type for each of the `extra` base types too.
///
/// Each member name `m` gets its own type name `$Mem_m`, under which the
/// interface's local environment gives the member's channel type. Variables
/// get container types; class names keep their interface.
pub fn encode_gamma_with(gamma: &WcTypeEnv, extra: &BTreeSet<BaseType>) -> TypeEnv {
    let mut out = TypeEnv::new();
    let mut containers: BTreeSet<BaseType> = extra.clone();
    out.define(RET_TYPE, TreeType::chan(vec![]));
    for (x, b) in &gamma.names {
        if gamma.classes.contains(x) {
            out.bind(x.clone(), b.clone());
        } else {
            out.bind(x.clone(), ref_type(b));
            containers.insert(b.clone());
        }
    }
    for (i, members) in &gamma.interfaces {
        let mut tree = TreeType::no_chan();
        for (m, t) in members {
            let key = member_type_name(m);
            out.bind(m.clone(), BaseType::Named(key.clone()));
            out.define(key.clone(), TreeType::no_chan());
            match t {
                WcType::Base(b) => {
                    containers.insert(b.clone());
                    tree = tree.with(key, TreeType::chan(vec![b.clone()]));
                }
                WcType::Proc(bs) => {
                    let mut carried = vec![ret_type()];
                    carried.extend(bs.iter().cloned());
                    out.define(proc_type_name(bs), TreeType::chan(carried.clone()));
                    containers.extend(bs.iter().cloned());
                    tree = tree.with(key, TreeType::chan(carried));
                }
                WcType::Iface(_) => {}
            }
        }
        out.define(i.clone(), tree);
        containers.insert(BaseType::Named(i.clone()));
    }
    containers.insert(BaseType::Int);
    containers.insert(BaseType::Bool);
    for b in containers {
        out.define(ref_type_name(&b), TreeType::chan(vec![b]));
    }
    out
}

pub fn encode_gamma(gamma: &WcTypeEnv) -> TypeEnv {
    encode_gamma_with(gamma, &BTreeSet::new())
}

/// `⟦⟨S, envTSV⟩⟧ = ⟦envT⟧ | ⟦envS⟧ | new r:$Ret (⟦envV⟧[⟦S⟧(r)] | r?().0)`
pub fn encode_configuration(
    gamma: &WcTypeEnv,
    env_t: &EnvT,
    env_s: &EnvS,
    env_v: &EnvV,
    s: &WcStm,
) -> Result<CompilationUnit, Untranslatable> {
    let mut enc = Encoder::new();
    let methods = enc.method_table(env_t, gamma)?;
    let store = enc.store(env_s);
    let context = enc.locals(env_v, gamma)?;
    let r = enc.mint("r");
    let mut inner = gamma.clone();
    for (x, b, _) in &context.cells {
        inner.names.insert(x.clone(), b.clone());
    }
    let body = enc.stm(s, &r, &inner)?;
    let main = Process::restrict(
        vec![(r.clone(), ret_type())],
        Process::par(context.fill(body), Process::input(vec![name_val(&r)], vec![], Process::Nil)),
    );
    let process = Process::par(Process::par(methods, store), main);
    store_types(env_s, gamma, &mut enc.used);
    let decoder = env_s
        .iter()
        .flat_map(|(a, f)| f.iter().map(move |(p, _)| ((a.clone(), p.clone()), vec![name_val(a), name_val(p)])))
        .collect();
    Ok(CompilationUnit {
        process,
        gamma: encode_gamma_with(gamma, &enc.used),
        decoder,
        ret: r,
    })
}

/// Compiles a program: its declarations become `envT` and `envS`, and `main`
/// runs from an empty `envV`. Γ is read off the declarations leniently, so
/// ill-typed programs compile whenever every needed annotation exists.
pub fn compile(program: &WcProgram) -> Result<CompilationUnit, Untranslatable> {
    let gamma = gamma_of(program);
    let (env_s, env_t) = build_environments(&program.classes).map_err(|e| Untranslatable(e.to_string()))?;
    encode_configuration(&gamma, &env_t, &env_s, &EnvV::new(), &program.main)
}
