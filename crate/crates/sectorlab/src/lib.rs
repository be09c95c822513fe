//! Exact and numerical tools for Gaussian integers in narrow sectors.
//!
//! The crate is organised by subject:
//!
//! * [`gaussian`]: arithmetic in ℤ[i], canonical associates, prime sieving by
//!   norm and weighted point sets of almost primes.
//! * [`sector`]: window sums, the exact variance integral, covered measure and
//!   pair-proximity sums.
//! * [`hecke`]: Hecke characters `λ^m`, spectra, mean-value report cards and
//!   pointwise-bound experiments.
//! * [`exppair`]: the exponent-pair calculus in exact rationals.
//! * [`density`]: large-value and density thresholds, and the feasibility
//!   engine for the exponent `C`.
//! * [`divisor`]: singular series, smooth weights and the shifted divisor
//!   correlation in arithmetic progressions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod density;
pub mod divisor;
pub mod error;
pub mod exppair;
pub mod gaussian;
pub mod hecke;
pub mod numeric;
pub mod rational;
pub mod sector;

pub use error::{Error, Result};
pub use gaussian::{canonicalize, CanonicalElement, GaussianInt};
