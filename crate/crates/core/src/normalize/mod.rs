//! Normal forms and the conversions between them.

pub mod anf;
pub mod cfg;
pub mod pack;
pub mod strict;
pub mod structured;

pub use anf::{let_anf, propagate_copies, to_anf};
pub use cfg::{canonical, check_cfg, dominance_tree, from_cfg, is_permutation_of, prune_unreachable, to_cfg, Cfg, CfgError, DomTree};
pub use pack::{pack_ctx, pack_labels, pack_region, packed_ctx_ty, packed_labels_ty, unpack_ctx, unpack_labels};
pub use strict::{add_dom, split_entry, ssa_where, to_strict, NotStrict};
pub use structured::{case_enum, do_loop, seq, to_structured, topwhile, towhile, ua};
