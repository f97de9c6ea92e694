//! Typing-directed generation of well-typed `(Γ, P)` pairs.
//!
//! Terms are read off derivations built with the process rules, so every
//! generated pair passes `check_wellformed` and `typecheck_process` without
//! filtering.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::epi::{BaseType, Capability, Expr, Name, Operator, Process, TreeType, TypeEnv, TypeName, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    /// Maximum nesting of process constructors.
    pub max_depth: usize,
    /// Maximum number of carried types per channel.
    pub max_vector: usize,
    /// Number of type names in the generated environment.
    pub type_pool: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 500,
            seed: 0,
            max_depth: 6,
            max_vector: 2,
            type_pool: 3,
        }
    }
}

/// Longest subject vector the generator composes.
const MAX_SUBJECT: usize = 3;
/// Bound on the subjects considered at one program point.
const MAX_SUBJECTS: usize = 64;

pub struct Generator {
    rng: ChaCha8Rng,
    config: FuzzConfig,
    /// When set, output objects may have the wrong type. The result is then
    /// only typeable with the object check switched off.
    mutate: bool,
    next: usize,
}

impl Generator {
    pub fn new(config: FuzzConfig) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            mutate: false,
            next: 0,
        }
    }

    /// A generator whose outputs only typecheck without the object check.
    pub fn mutated(config: FuzzConfig) -> Generator {
        Generator {
            mutate: true,
            ..Generator::new(config)
        }
    }

    fn fresh(&mut self, stem: &str) -> Name {
        self.next += 1;
        Name::new(format!("{stem}{}", self.next))
    }

    fn pool(&self) -> Vec<TypeName> {
        (0..self.config.type_pool.max(1)).map(|i| TypeName::new(format!("T{i}"))).collect()
    }

    fn base_type(&mut self) -> BaseType {
        let pool = self.pool();
        match self.rng.gen_range(0..4) {
            0 => BaseType::Int,
            1 => BaseType::Bool,
            _ => BaseType::Named(pool.choose(&mut self.rng).expect("non-empty pool").clone()),
        }
    }

    fn tree(&mut self, depth: usize) -> TreeType {
        let capability = if self.rng.gen_bool(0.8) {
            let n = self.rng.gen_range(0..=self.config.max_vector);
            Capability::Chan((0..n).map(|_| self.base_type()).collect())
        } else {
            Capability::NoChan
        };
        let mut tree = TreeType::new(capability);
        if depth > 0 {
            let pool = self.pool();
            for _ in 0..self.rng.gen_range(0..=2) {
                let key = pool.choose(&mut self.rng).expect("non-empty pool").clone();
                let child = self.tree(depth - 1);
                tree.local.insert(key, child);
            }
        }
        tree
    }

    /// A well-formed environment: a tree type for each pool entry, one or two
    /// channel names per type name, and a name of each sort.
    pub fn gamma(&mut self) -> TypeEnv {
        let mut gamma = TypeEnv::new();
        for t in self.pool() {
            let tree = self.tree(2);
            gamma.define(t.clone(), tree);
            for _ in 0..self.rng.gen_range(1..=2) {
                let x = self.fresh("c");
                gamma.bind(x, BaseType::Named(t.clone()));
            }
        }
        let n = self.fresh("n");
        gamma.bind(n, BaseType::Int);
        let b = self.fresh("b");
        gamma.bind(b, BaseType::Bool);
        gamma
    }

    /// Every composable subject with a channel capability, and what it
    /// carries.
    fn subjects(&self, env: &TypeEnv) -> Vec<(Vec<Value>, Vec<BaseType>)> {
        fn extend(
            env: &TypeEnv,
            prefix: &mut Vec<Value>,
            tree: &TreeType,
            out: &mut Vec<(Vec<Value>, Vec<BaseType>)>,
        ) {
            if out.len() >= MAX_SUBJECTS {
                return;
            }
            if let Capability::Chan(carried) = &tree.capability {
                out.push((prefix.clone(), carried.clone()));
            }
            if prefix.len() >= MAX_SUBJECT {
                return;
            }
            for (key, child) in &tree.local {
                for (m, t) in &env.names {
                    if t.as_type_name() == Some(key) {
                        prefix.push(Value::Name(m.clone()));
                        extend(env, prefix, child, out);
                        prefix.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (n, t) in &env.names {
            if let Some(tree) = t.as_type_name().and_then(|i| env.typenames.get(i)) {
                extend(env, &mut vec![Value::Name(n.clone())], tree, &mut out);
            }
        }
        out
    }

    fn names_of(env: &TypeEnv, ty: &BaseType) -> Vec<Name> {
        env.names.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect()
    }

    /// An expression of sort `ty`, or `None` for a type name with no name in
    /// scope.
    fn expr(&mut self, env: &TypeEnv, ty: &BaseType, depth: usize) -> Option<Expr> {
        let names = Self::names_of(env, ty);
        let pick_name = !names.is_empty() && self.rng.gen_bool(0.4);
        if pick_name {
            return Some(Expr::Val(Value::Name(names.choose(&mut self.rng)?.clone())));
        }
        let compound = depth > 0 && self.rng.gen_bool(0.3);
        match ty {
            BaseType::Int if compound => {
                let op = *[Operator::Add, Operator::Sub, Operator::Mul].choose(&mut self.rng)?;
                let args = vec![self.expr(env, ty, depth - 1)?, self.expr(env, ty, depth - 1)?];
                Some(Expr::op(op, args))
            }
            BaseType::Int => Some(Expr::int(self.rng.gen_range(-3..10))),
            BaseType::Bool if compound => Some(match self.rng.gen_range(0..4) {
                0 => Expr::op(
                    Operator::Lt,
                    vec![self.expr(env, &BaseType::Int, depth - 1)?, self.expr(env, &BaseType::Int, depth - 1)?],
                ),
                1 => {
                    let sort = self.base_type();
                    let (a, b) = (self.expr(env, &sort, depth - 1), self.expr(env, &sort, depth - 1));
                    match (a, b) {
                        (Some(a), Some(b)) => Expr::op(Operator::Eq, vec![a, b]),
                        _ => Expr::bool(true),
                    }
                }
                2 => Expr::op(Operator::Not, vec![self.expr(env, ty, depth - 1)?]),
                _ => {
                    let op = *[Operator::And, Operator::Or].choose(&mut self.rng)?;
                    Expr::op(op, vec![self.expr(env, ty, depth - 1)?, self.expr(env, ty, depth - 1)?])
                }
            }),
            BaseType::Bool => Some(Expr::bool(self.rng.gen_bool(0.5))),
            BaseType::Named(_) => names.choose(&mut self.rng).map(|n| Expr::Val(Value::Name(n.clone()))),
        }
    }

    /// An expression of some sort other than `ty`.
    fn wrong_expr(&mut self, env: &TypeEnv, ty: &BaseType) -> Expr {
        match ty {
            BaseType::Int => Expr::bool(true),
            BaseType::Bool => Expr::int(self.rng.gen_range(0..5)),
            BaseType::Named(_) => {
                if self.rng.gen_bool(0.5) {
                    Expr::int(1)
                } else {
                    let other: Vec<Name> = env
                        .names
                        .iter()
                        .filter(|(_, t)| *t != ty)
                        .map(|(n, _)| n.clone())
                        .collect();
                    other.choose(&mut self.rng).map(|n| Expr::Val(Value::Name(n.clone()))).unwrap_or(Expr::bool(false))
                }
            }
        }
    }

    fn subject(&mut self, env: &TypeEnv) -> Option<(Vec<Value>, Vec<BaseType>)> {
        self.subjects(env).choose(&mut self.rng).cloned()
    }

    fn output(&mut self, env: &TypeEnv, depth: usize) -> Option<Process> {
        let (subject, carried) = self.subject(env)?;
        Some(self.output_on(env, subject, carried, depth))
    }

    fn output_on(&mut self, env: &TypeEnv, subject: Vec<Value>, carried: Vec<BaseType>, depth: usize) -> Process {
        let mut fresh: Vec<(Name, BaseType)> = Vec::new();
        let mut objects = Vec::new();
        for ty in &carried {
            if self.mutate && self.rng.gen_bool(0.3) {
                objects.push(self.wrong_expr(env, ty));
                continue;
            }
            let restrict = matches!(ty, BaseType::Named(_)) && self.rng.gen_bool(0.3);
            match (restrict, self.expr(env, ty, 2)) {
                (false, Some(e)) => objects.push(e),
                _ => {
                    let z = self.fresh("z");
                    objects.push(Expr::Val(Value::Name(z.clone())));
                    fresh.push((z, ty.clone()));
                }
            }
        }
        let inner = env.extended(fresh.iter().map(|(n, t)| (n, t)));
        let body = self.continuation(&inner, depth);
        Process::restrict(fresh, Process::output(subject, objects, body))
    }

    fn input(&mut self, env: &TypeEnv, depth: usize) -> Option<Process> {
        let (subject, carried) = self.subject(env)?;
        Some(self.input_on(env, subject, carried, depth))
    }

    fn input_on(&mut self, env: &TypeEnv, subject: Vec<Value>, carried: Vec<BaseType>, depth: usize) -> Process {
        let binders: Vec<Name> = carried.iter().map(|_| self.fresh("v")).collect();
        let inner = env.extended(binders.iter().zip(&carried));
        let body = self.continuation(&inner, depth);
        Process::input(subject, binders, body)
    }

    /// An output and an input on the same subject, so that they can
    /// communicate; the input is sometimes replicated.
    fn exchange(&mut self, env: &TypeEnv, depth: usize) -> Option<Process> {
        let (subject, carried) = self.subject(env)?;
        let out = self.output_on(env, subject.clone(), carried.clone(), depth);
        let inp = self.input_on(env, subject, carried, depth);
        let inp = if self.rng.gen_bool(0.2) { Process::repl(inp) } else { inp };
        Some(Process::par(out, inp))
    }

    fn continuation(&mut self, env: &TypeEnv, depth: usize) -> Process {
        if depth == 0 || self.rng.gen_bool(0.3) {
            Process::Nil
        } else {
            self.process(env, depth - 1)
        }
    }

    /// A process typeable under `env`.
    pub fn process(&mut self, env: &TypeEnv, depth: usize) -> Process {
        crate::grow(|| {
            let choice = if depth == 0 {
                self.rng.gen_range(0..3)
            } else {
                self.rng.gen_range(0..12)
            };
            let p = match choice {
                0 => Some(Process::Nil),
                1 | 3 => self.output(env, depth),
                2 | 4 => self.input(env, depth),
                9..=11 => self.exchange(env, depth - 1),
                5 | 6 => Some(Process::par(self.process(env, depth - 1), self.process(env, depth - 1))),
                7 => {
                    let n = self.rng.gen_range(1..=2);
                    let bindings: Vec<(Name, BaseType)> = (0..n).map(|_| (self.fresh("r"), self.base_type())).collect();
                    let inner = env.extended(bindings.iter().map(|(n, t)| (n, t)));
                    Some(Process::restrict(bindings, self.process(&inner, depth - 1)))
                }
                _ => {
                    if self.rng.gen_bool(0.5) {
                        self.input(env, depth - 1).map(Process::repl)
                    } else {
                        let n = self.rng.gen_range(1..=2);
                        let mut branches = Vec::new();
                        for _ in 0..n {
                            let guard = self.expr(env, &BaseType::Bool, 2).unwrap_or(Expr::bool(true));
                            branches.push((guard, self.process(env, depth - 1)));
                        }
                        Some(Process::sum(branches))
                    }
                }
            };
            p.unwrap_or(Process::Nil)
        })
    }

    /// The next `(Γ, P)` pair.
    pub fn case(&mut self) -> (TypeEnv, Process) {
        let gamma = self.gamma();
        let depth = self.config.max_depth;
        let p = self.process(&gamma, depth);
        (gamma, p)
    }
}

/// The corpus of `config.count` pairs for `config.seed`.
pub fn generate_corpus(config: FuzzConfig) -> Vec<(TypeEnv, Process)> {
    let mut g = Generator::new(config);
    (0..config.count).map(|_| g.case()).collect()
}
