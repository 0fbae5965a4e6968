//! Exchangeable Farlie-Gumbel-Morgenstern copulas, end to end.
//!
//! An exchangeable FGM (eFGM) copula ties every k-dependence parameter of a
//! d-variate FGM copula to a single value per order k, cutting the parameter
//! count from `2^d - d - 1` to `d - 1`. The crate covers:
//!
//! * [`representations`] — the four equivalent parameterizations (dependence
//!   parameters, joint success probabilities, Bernoulli-sum pmf, mixing
//!   distributions) and all conversions between them;
//! * [`geometry`] — admissibility of parameter vectors and the extreme points
//!   of the parameter polytope, including convex decompositions;
//! * [`ordering`] — the extreme negative/positive dependence bounds and
//!   convex/supermodular order checks;
//! * [`evaluation`] — exact cdf, density and log-likelihood in O(d^2) per
//!   point via a symmetric-sum dynamic program;
//! * [`sampling`] — exact seeded sampling through the Bernoulli
//!   representation;
//! * [`estimation`] — maximum-likelihood fitting as a finite mixture over
//!   extreme points with an EM fixed-point iteration.

pub mod error;

mod binom;

pub mod estimation;
pub mod evaluation;
pub mod geometry;
pub mod ordering;
pub mod representations;
pub mod sampling;

pub use error::{Error, Result};
pub use representations::{CopulaModel, MixingSpec, NdPmf, ThetaVector, ZetaVector};

/// Absolute tolerance for exact identities (sums to one, pinned entries).
pub const TOL_EQ: f64 = 1e-12;
/// Absolute tolerance for inverse maps and round trips.
pub const TOL_ROUND_TRIP: f64 = 1e-10;
/// Absolute tolerance for quadrature cross-checks.
pub const TOL_QUADRATURE: f64 = 1e-8;
/// Probabilities in `(NEG_PROB_CLAMP, 0)` are treated as exact zeros.
pub const NEG_PROB_CLAMP: f64 = -1e-12;
