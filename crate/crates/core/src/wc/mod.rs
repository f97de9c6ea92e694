//! The WC class language: syntax, big-step semantics and interface types.

pub mod env;
pub mod eval;
pub mod parse;
pub mod print;
pub mod syntax;
pub mod types;

pub use env::{build_environments, EnvF, EnvM, EnvS, EnvT, EnvV, MethodBody};
pub use eval::{eval_wc_expr, exec, run_program, ExecError, Outcome, WcEvalError, DEFAULT_FUEL};
pub use parse::{parse_program, parse_program_with_warnings, parse_stm};
pub use print::print_program;
pub use syntax::{ClassDecl, InterfaceDecl, MethodDecl, WcExpr, WcProgram, WcStm};
pub use types::{
    build_gamma, gamma_of, typecheck_program, typecheck_wc_envs, typecheck_wc_expr, typecheck_wc_stm, WcType, WcTypeEnv,
    WcTypeError, WcTypeErrorKind,
};
