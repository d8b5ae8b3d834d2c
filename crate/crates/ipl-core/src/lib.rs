//! Core algorithms for working with intuitionistic propositional logic (IPL):
//!
//! - [`prop`]: the proposition AST, its concrete syntax, and the canonical
//!   enumeration order.
//! - [`codec`]: an exact bijection between propositions with a fixed number of
//!   internal nodes and arbitrary-precision naturals, plus uniform sampling.
//! - [`kernel`]: a Lean-style tactic kernel implementing natural deduction for
//!   IPL, with script checking and Lean source emission.
//! - [`fps`]: focused proof search (inversion + chaining with backtracking)
//!   that records full trial-and-error traces, and the trace text format.
//! - [`oracle`]: an independent contraction-free sequent-calculus decision
//!   procedure for IPL provability.
//! - [`dataset`]: corpus records, word-length statistics and quantile splits.
//! - [`harness`]: DFS and greedy trial-and-error inference loops with exact
//!   search-cost accounting, driven by pluggable tactic generators.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only forwards to dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

/// Re-exported because `codec::PropositionId` wraps `BigUint`.
pub use num_bigint;

pub mod codec;
pub mod dataset;
pub mod fps;
pub mod harness;
pub mod kernel;
pub mod oracle;
pub mod prop;
pub(crate) mod rng;

/// Deterministic seed derivation, shared with downstream drivers so that
/// per-theorem work stays reproducible however it is scheduled.
pub mod seeds {
    /// The `index`-th child seed of `base`.
    pub fn derive(base: u64, index: u64) -> u64 {
        crate::rng::derive_seed(base, index)
    }

    /// Folds arbitrary bytes (e.g. a decimal theorem id) into a seed.
    pub fn from_bytes(base: u64, bytes: &[u8]) -> u64 {
        crate::rng::seed_from_bytes(base, bytes)
    }
}
