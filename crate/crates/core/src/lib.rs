//! Adaptive-measure sieve for covering systems of arithmetic progressions.
//!
//! This crate is `no_std` (with `alloc`) and holds every piece of the
//! mathematics: prime and smooth-number machinery, an exact rational
//! simulator of the distortion sieve, the computable moment envelopes and
//! the `f_k` recursion behind the threshold table, the quotient-indexed
//! `Θ` table used for the minimum-modulus bound, the smooth-antichain
//! verifier and the counterexample constructions.
//!
//! File formats, the on-disk prime cache, report serialization and the
//! command-line front end live in the `covering-sieve` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod antichains;
pub mod constructions;
mod error;
pub mod float;
pub mod minmod;
pub mod moments;
pub mod numtheory;
pub mod sieve;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Default cap on enumerated elements (smooth numbers, interval terms, antichain nodes).
pub const DEFAULT_ENUMERATION_CAP: usize = 100_000_000;

/// Default cap on the number of residues an exact computation may materialize.
pub const DEFAULT_RESIDUE_CAP: u64 = 10_000_000;

/// Per-step upward inflation applied to floating point upper bounds.
pub const DEFAULT_INFLATION: f64 = 1.0 + 1e-15;
