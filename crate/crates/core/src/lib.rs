//! Computation in linear n-normed spaces over `R^d` and fixed-point iteration
//! with certified error bounds.
//!
//! The concrete n-norm is the Gram (volume) norm
//!
//! ```text
//! ||x_1, ..., x_n|| = sqrt(det G),   G_ij = <x_i, x_j>
//! ```
//!
//! Freezing the last `n - 1` slots at fixed anchors `b_2, ..., b_n` gives the
//! semi-norm `||x, b_2, ..., b_n||`, which vanishes on the anchor span. Every
//! "b-" notion in this crate (b-Cauchy, b-bounded, b-contraction) is measured
//! in that semi-norm, so all uniqueness statements hold modulo the anchor span.
//!
//! Modules:
//!
//! * [`nnorm`] -- Gram n-norm, anchored spaces, balls, product norm, prefix
//!   estimators.
//! * [`operator`] -- the self-maps `T` and their evaluation.
//! * [`estimate`] -- sampled operator norms, contraction constants and
//!   continuity probes.
//! * [`solver`] -- Picard, ball-restricted, summable, Kannan and Edelstein
//!   iterations with traces.
//! * [`harness`] -- seeded property suites with structured reports.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod linalg;
mod sampling;
mod vector;

pub mod estimate;
pub mod harness;
pub mod nnorm;
pub mod operator;
pub mod solver;

pub use error::Error;
pub use linalg::{gram_determinant, gram_nnorm, gram_nnorm_with_tol, is_linearly_dependent};
pub use vector::Vector;

/// Default relative pivot threshold for numerical rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
