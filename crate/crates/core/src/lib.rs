//! Extremal polynomials bounded on sets of fixed measure.
//!
//! Given `δ ∈ (0, 1)` and a point `x₀ ∈ [-1, 0]`, the crate computes the
//! largest value `|P(x₀)|` a degree-`n` polynomial can take when it is
//! bounded by one on some closed `E ⊆ [-1, 1]` of measure `2 - 2δ`, together
//! with the asymptotic machinery that describes it:
//!
//! * [`interval_sets`] – compact sets built from intervals, gap sets
//!   `E(α, δ) = [-1, 1] \ (α-δ, α+δ)`, grids and random multi-gap sets.
//! * [`chebyshev`] – Chebyshev polynomials, the Remez polynomial, the even
//!   Akhiezer polynomial and Chebyshev-series evaluation.
//! * [`green`] – Green functions of the complement of two intervals, the
//!   critical point `c(α)`, its derivative and `∂_α G`.
//! * [`envelope`] – the stationary point `x₀(α)`, the upper envelope
//!   `Φ_δ`, breakpoints `x_*`, `x_s`, `δ_*` and the asymptotic diagram.
//! * [`extremal`] – finite-degree ground truth `M_n(x₀, E)` by a
//!   semi-infinite linear program with exchange refinement.
//! * [`problem`] – `L_{n,δ}(x₀)`, residual series and the brute-force
//!   comparison against random multi-gap sets.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod envelope;
pub mod error;
pub mod extremal;
pub mod green;
pub mod interval_sets;
pub mod problem;
pub mod quadrature;
mod search;

pub use error::{Error, Result};
