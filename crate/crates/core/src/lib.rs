//! Maximal sharing for the λ-calculus with letrec.
//!
//! Terms are interpreted as first-order λ-term-graphs, compacted by
//! bisimulation collapse and read back into terms. Unfolding equivalence of
//! two terms is decided by bisimilarity of their graphs, and a depth-bounded
//! unfolding oracle checks that every transformation preserves meaning.
//!
//! ```
//! use maxshare_core::{maximal_shared_form, parse, print, unfolding_equivalent, SharingOptions};
//!
//! let t = parse(r"\f. let r = f (f r) in r").unwrap();
//! let compact = maximal_shared_form(&t, SharingOptions::default());
//! assert_eq!(print(&compact), r"\x0. let f0 = x0 f0 in f0");
//! assert!(unfolding_equivalent(&t, &compact));
//! ```

pub mod bisim;
pub mod corpus;
pub mod fograph;
pub mod gen;
pub mod hograph;
pub mod readback;
pub mod syntax;
pub mod translate;
pub mod unfold;

pub use bisim::{bisimilar, collapse, unshare_s, unshare_variables};
pub use fograph::{
    graph_size, infer_abspre, is_eager_scope, isomorphic, to_dot, AbsPrefix, GraphBuilder,
    GraphError, Label, TermGraph, VertexId,
};
pub use hograph::{check_ho, ht, th, HoTermGraph};
pub use readback::{
    maximal_shared_form, readback, try_maximal_shared_form, unfolding_equivalent, ReadbackError,
    SharingOptions,
};
pub use syntax::{
    alpha_eq, free_vars, garbage_collect, parse, print, term_size, Binding, ParseError, Term,
};
pub use translate::{translate_fo, translate_fo_max, translate_fo_min, translate_ho, Semantics};
pub use unfold::{bounded_unfold, oracle_equiv, unfold_step, FiniteTree};
