//! Toolkit for reversible regular languages over partial DFAs.
//!
//! Given any recognizer of a regular language, the library decides whether the
//! language has finitely many reduced reversible automata up to isomorphism,
//! and constructs explicit witnesses either way: a computable state bound in
//! the finite case, and arbitrarily large reduced reversible recognizers in
//! the infinite case.
//!
//! The main entry points are:
//! - [`parse_dfa`] / [`serialize_dfa`] for the text format, [`to_dot`] for DOT;
//! - [`minimize`], [`equivalent`], [`canonical_form`], [`isomorphic`];
//! - [`decide`], returning a [`FinitenessVerdict`];
//! - [`blowup_pipeline`], growing reduced reversible recognizers past any prime;
//! - [`oracle`], brute-force enumeration of recognizers at desk scale.

pub mod analysis;
pub mod automaton;
pub mod canonical;
pub mod congruence;
pub mod construct;
pub mod format;
pub mod minimize;
pub mod oracle;
pub mod scc;

pub use analysis::{
    classify, decide, decide_minimal, find_witness, forbidden_pattern, is_reversible_language,
    state_bound, AnalysisError, Direction, FinitenessVerdict, ForbiddenPattern, Multiplicity,
    StateAnalysis, ZigZagWitness,
};
pub use automaton::{DfaBuilder, DfaError, LetterId, PartialDfa, StateId, Word};
pub use canonical::{canonical_form, isomorphic, CanonicalDfa};
pub use congruence::{
    closure_from_pair, factor, find_nontrivial_reversible_congruence, is_congruence,
    is_reversible_congruence, reduce_reversible, reduce_reversible_with_map, zigzag_collapse,
    Congruence, CongruenceError,
};
pub use construct::{
    annotate, blowup_pipeline, check_pattern, cycle_blowup, find_cycle, make_reversible, rewire,
    BlowupReport, ConstructError, CycleBlowup, LoopCycle, PatternCheck, PatternInstance,
};
pub use format::{parse_dfa, serialize_dfa, to_dot, ParseError};
pub use minimize::{equivalent, is_minimal, minimize, star_map, state_equivalent, StarMapError};
pub use scc::{sccs, SccDecomposition};
