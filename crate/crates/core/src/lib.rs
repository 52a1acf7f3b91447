//! Exact arithmetic for continued fractions and the dynamics of best
//! rational approximations.
//!
//! The crate is organised around a handful of pieces:
//!
//! * [`cf`] — continued-fraction streams, convergents, tails and rigorously
//!   enclosed approximation errors ([`cf::ErrorValue`]), together with the
//!   adaptive interval comparison [`cf::compare_error`] that proves strict
//!   orderings without ever trusting floating point.
//! * [`psi`] — the irrationality-measure step function `ψ_α(t)` as a lazily
//!   materialised, queryable object, plus an independent brute-force oracle.
//! * [`dynamics`] — permutation traces of labelled tuples: which member has
//!   the worst approximation error at a given height, and how those
//!   orderings recur.
//! * [`lemmas`] — machine checks of the continuant/Perron identities and an
//!   exhaustive scanner for the main-lemma conditions on pairs of fractions.
//! * [`forge`] — a congruence-driven construction of tuples whose
//!   permutation dynamics cycle through exactly `k` recurring orderings.
//!
//! Everything is `no_std + alloc`; all integers are arbitrary precision and
//! all comparisons that feed a theorem check are exact or interval-proven.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cf;
pub mod dynamics;
pub mod forge;
pub mod lemmas;
pub mod psi;
pub mod ratio;

/// Default refinement budget for interval comparisons. Deep enough to
/// separate any two incommensurable values in desk-scale corpora while
/// bounding worst-case work; override per call or via the CLI.
pub const DEFAULT_MAX_DEPTH: u64 = 64;
