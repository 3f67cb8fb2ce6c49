//! Cost estimation and simulation for guessing cryptographic keys drawn
//! from non-uniform distributions.
//!
//! The optimal classical attack queries keys in decreasing order of
//! probability; its expected cost is the guessing moment Σ i·p_i, which is
//! sandwiched between Rényi-entropy bounds. The optimal quantum attack is a
//! Grover-style search over prefixes of the same order, governed by
//! Σ √i·p_i. This crate provides:
//!
//! * [`dist`] — finite discrete distributions, product distributions χ^n,
//!   the named families (Bernoulli, ternary, binomial, discrete Gaussian,
//!   Zipf, geometric, Poisson) and the Rényi/Shannon/min entropy family.
//! * [`rank`] — rank ↔ key enumeration over χ^n via type classes, making
//!   the i-th most likely key of an exponentially large key space
//!   addressable in O(|A|·n) big-integer operations.
//! * [`cost`] — exact values and certified brackets for the guessing
//!   moments, the two-sided entropy sandwich, quantum speed-up reports and
//!   the Grover query-count formula.
//! * [`sim`] — seeded, replayable simulations of single-key and multi-key
//!   guessing (classical and quantum cost accounting), plus Monte Carlo
//!   estimators for core-set membership.
//! * [`verify`] — named property suites runnable from the CLI.

pub mod cost;
pub mod dist;
mod error;
pub mod logdomain;
pub mod rank;
pub mod sim;
pub mod textfmt;
pub mod verify;

pub use error::{Error, Result};
