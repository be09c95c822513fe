//! The `sectorlab` guide, compiled.
//!
//! Each module below includes one chapter of `book/src` so that `cargo test`
//! runs its snippets. Build the rendered guide with `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/gaussian-integers.md")]
pub mod gaussian_integers {}

#[doc = include_str!("../../../book/src/sectors.md")]
pub mod sectors {}

#[doc = include_str!("../../../book/src/hecke.md")]
pub mod hecke {}

#[doc = include_str!("../../../book/src/exponent-pairs.md")]
pub mod exponent_pairs {}

#[doc = include_str!("../../../book/src/density.md")]
pub mod density {}

#[doc = include_str!("../../../book/src/divisor-correlations.md")]
pub mod divisor_correlations {}

#[doc = include_str!("../../../book/src/exactness.md")]
pub mod exactness {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
