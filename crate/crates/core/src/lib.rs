//! Fourier-analytic dense models for sparse additive problems.
//!
//! The crate builds, for an unbounded weight `f` dominated by a majorant `ν`
//! on `[N] = {1, …, N}`, bounded approximants `g` whose Fourier transforms are
//! uniformly close to `f̂`, and uses them to count solutions of a single
//! translation-invariant linear equation. Every numerical claim is reported
//! together with how it was obtained: exactly, as a certified bound, or as a
//! sampled estimate.

pub mod convex;
pub mod counting;
pub mod dense_models;
pub mod error;
pub mod lp;
pub mod majorants;
pub mod pipeline;
#[cfg(test)]
mod properties;
pub mod report;
pub mod signal;
pub mod spectrum;
pub mod weierstrass;

pub use error::{Result, TlabError};
pub use signal::{CertifiedSup, DiscreteSignal, FrequencyGrid};
