//! Polyadic-synchronisation pi-calculus (epi) with tree-shaped channel types,
//! the WC class language, and the WC to epi compiler.

pub mod encode;
pub mod epi;
pub mod harness;
pub mod lex;
pub mod wc;

pub use lex::ParseError;

/// Runs `f` on a stack segment with enough headroom for deep recursion.
pub(crate) fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}
