//! The epi calculus: syntax, semantics and types.

pub mod engine;
pub mod ops;
pub mod parse;
pub mod print;
pub mod safety;
pub mod semantics;
pub mod subst;
pub mod syntax;
pub mod tenv;
pub mod types;
pub mod typing;

pub use engine::{explore_tau, frontier_cap, run_tau, Exploration, Runner, StateExplosion, Strategy, Trace, DEFAULT_FRONTIER_CAP};
pub use ops::{eval_expr, EvalError, Operator};
pub use parse::parse_process;
pub use print::print_process;
pub use safety::{now_safe, safe_bounded, wrong, wrong_witness};
pub use semantics::{transitions, Transition, TransitionSet};
pub use subst::{alpha_eq, canonical, free_names, substitute};
pub use syntax::{Expr, Label, Name, Process, Value};
pub use tenv::{parse_tenv, print_tenv};
pub use types::{check_wellformed, BaseType, Capability, TreeType, TypeEnv, TypeName};
pub use typing::{
    type_of_subject, type_of_value, typecheck_expr, typecheck_label, typecheck_process,
    typecheck_process_with, SubjectError, TypeError, TypingOptions,
};
