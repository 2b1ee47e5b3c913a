//! Exact enumeration of valleyless sequences and of permutations counted by
//! valleys.
//!
//! A sequence of positive integers is *valleyless* when no entry is smaller
//! than some entry on each side of it, i.e. it rises (weakly) and then falls
//! (weakly). The crate provides:
//!
//! - [`seq_core`]: sequence and permutation types, valley/inversion/descent statistics
//! - [`bijections`]: compositions, the partial-sum subset encoding, the
//!   valleyless-permutation/composition bijection and recursive generators
//! - [`counting`]: big-integer recurrences and closed forms
//! - [`series`]: an exact truncated power-series engine in `x`, `q`, `y` and
//!   every generating function built on it
//! - [`oracle`]: brute-force enumerators used to cross-check all of the above
//! - [`cli`]: the `vls` command-line front end

pub mod bijections;
pub mod cli;
pub mod counting;
mod error;
pub mod oracle;
pub mod seq_core;
pub mod series;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
