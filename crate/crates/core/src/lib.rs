//! A typed SSA intermediate representation with lexically scoped
//! where-blocks, an equational rewrite engine, normalization passes
//! (ANF, strict SSA, CFG conversion, structured control flow) and executable
//! denotational semantics over concrete iteration models.

pub mod gen;
pub mod ir;
pub mod normalize;
pub mod semantics;
pub mod subst;
pub mod syntax;
pub mod rewrite;
pub mod typing;

pub use ir::*;
pub use subst::{LabelSubst, Subst};
pub use typing::TypeError;
