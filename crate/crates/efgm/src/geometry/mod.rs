//! Admissibility of dependence-parameter vectors and the extreme-point
//! structure of the parameter polytope.
//!
//! By exchangeability the 2^d sign constraints on `(theta_2, ..., theta_d)`
//! collapse to `d + 1` margins `g(m) = 1 + sum_k theta_k K_k(m)`, one per
//! count `m` of negative signs, where `K_k(m)` is the degree-k coefficient of
//! `(1 - x)^m (1 + x)^(d - m)`. The margins are, up to the factor
//! `C(d, m) 2^-d`, exactly the sum-pmf entries, so admissibility is pmf
//! nonnegativity. The literal 2^d enumeration is kept as a test oracle.

mod nnls;

use crate::binom::krawtchouk_row;
use crate::error::{Error, Result};
use crate::representations::{theta_from_nd_pmf, NdPmf, ThetaVector};
use crate::{NEG_PROB_CLAMP, TOL_ROUND_TRIP};

/// Result of an admissibility check: the `d + 1` collapsed sign margins.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// True when every margin is at least -1e-12.
    pub admissible: bool,
    /// True when the vector is admissible but some margin is nonpositive,
    /// i.e. it sits on the boundary of the parameter polytope.
    pub boundary: bool,
    /// `g(m)` for `m = 0..=d`.
    pub margins: Vec<f64>,
    /// Index of the smallest margin (smallest `m` on ties).
    pub worst_m: usize,
}

/// Evaluate the collapsed sign constraints of a parameter vector.
pub fn admissibility_check(t: &ThetaVector) -> ConstraintReport {
    let d = t.d();
    let mut margins = Vec::with_capacity(d + 1);
    for m in 0..=d {
        let row = krawtchouk_row(d, m);
        let g = 1.0 + (2..=d).map(|k| t.get(k) * row[k]).sum::<f64>();
        margins.push(g);
    }
    let mut worst_m = 0;
    for (m, g) in margins.iter().enumerate() {
        if *g < margins[worst_m] {
            worst_m = m;
        }
    }
    let min = margins[worst_m];
    ConstraintReport {
        admissible: min >= NEG_PROB_CLAMP,
        boundary: min >= NEG_PROB_CLAMP && min <= 0.0,
        margins,
        worst_m,
    }
}

/// Literal enumeration of all 2^d sign constraints; the oracle for
/// [`admissibility_check`]. Cost 2^d, so `d` is capped at 20.
pub fn full_constraint_check(t: &ThetaVector) -> Result<bool> {
    let d = t.d();
    if d > 20 {
        return Err(Error::Capability(format!(
            "full_constraint_check enumerates 2^d sign vectors; d = {d} exceeds the cap of 20"
        )));
    }
    let mut elem = vec![0.0f64; d + 1];
    for pattern in 0u32..(1u32 << d) {
        // Elementary symmetric sums of the sign vector via the product
        // (1 + eps_1 x) ... (1 + eps_d x).
        elem.iter_mut().for_each(|e| *e = 0.0);
        elem[0] = 1.0;
        for j in 0..d {
            let eps = if (pattern >> j) & 1 == 1 { -1.0 } else { 1.0 };
            for k in (1..=j + 1).rev() {
                elem[k] += eps * elem[k - 1];
            }
        }
        let value = 1.0 + (2..=d).map(|k| t.get(k) * elem[k]).sum::<f64>();
        if value < NEG_PROB_CLAMP {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A vertex of the sum-pmf polytope: two-point support `(j1, j2)` straddling
/// `d/2`, or (for even `d`) the one-point mass at the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Pair { j1: usize, j2: usize },
    Center,
}

/// An extreme point together with its pmf and dependence parameters.
#[derive(Debug, Clone)]
pub struct ExtremePoint {
    pub kind: VertexKind,
    pub pmf: NdPmf,
    pub theta: ThetaVector,
}

/// Number of extreme points: `(d + 1)^2 / 4` for odd `d`, `d^2 / 4 + 1` for
/// even `d`.
pub fn extreme_point_count(d: usize) -> usize {
    if d % 2 == 1 {
        (d + 1) * (d + 1) / 4
    } else {
        d * d / 4 + 1
    }
}

/// Enumerate the extreme points of the sum-pmf polytope in lexicographic
/// `(j1, j2)` order, center (even `d`) last.
///
/// The pair `(j1, j2)` carries mass `(j2 - d/2)/(j2 - j1)` at `j1` and
/// `(d/2 - j1)/(j2 - j1)` at `j2`, for `j1 <= j1_max` and `j2 >= j2_min` with
/// `(j1_max, j2_min) = ((d-1)/2, (d+1)/2)` for odd `d` and
/// `(d/2 - 1, d/2 + 1)` for even `d`.
pub fn enumerate_extreme_points(d: usize) -> Result<Vec<ExtremePoint>> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
    }
    let (j1_max, j2_min) = if d % 2 == 1 {
        ((d - 1) / 2, (d + 1) / 2)
    } else {
        (d / 2 - 1, d / 2 + 1)
    };
    let half = d as f64 / 2.0;
    let mut points = Vec::with_capacity(extreme_point_count(d));
    for j1 in 0..=j1_max {
        for j2 in j2_min..=d {
            let gap = (j2 - j1) as f64;
            let mut p = vec![0.0; d + 1];
            p[j1] = (j2 as f64 - half) / gap;
            p[j2] = (half - j1 as f64) / gap;
            let pmf = NdPmf::new(d, p)?;
            let theta = theta_from_nd_pmf(&pmf);
            points.push(ExtremePoint { kind: VertexKind::Pair { j1, j2 }, pmf, theta });
        }
    }
    if d % 2 == 0 {
        let mut p = vec![0.0; d + 1];
        p[d / 2] = 1.0;
        let pmf = NdPmf::new(d, p)?;
        let theta = theta_from_nd_pmf(&pmf);
        points.push(ExtremePoint { kind: VertexKind::Center, pmf, theta });
    }
    debug_assert_eq!(points.len(), extreme_point_count(d));
    Ok(points)
}

/// Convex mixture of vertex parameters: `theta_k = sum_j lambda_j theta_{j,k}`.
pub fn convex_combination_theta(weights: &[f64], points: &[ExtremePoint]) -> Result<ThetaVector> {
    if weights.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} extreme points",
            weights.len(),
            points.len()
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("empty extreme-point list".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -TOL_ROUND_TRIP) {
        return Err(Error::InvalidInput(format!("negative mixture weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TOL_ROUND_TRIP {
        return Err(Error::InvalidInput(format!("mixture weights sum to {total}, expected 1")));
    }
    let d = points[0].theta.d();
    let mut theta = vec![0.0; d - 1];
    for (w, pt) in weights.iter().zip(points) {
        if pt.theta.d() != d {
            return Err(Error::InvalidInput("extreme points of mixed dimension".into()));
        }
        for (acc, v) in theta.iter_mut().zip(pt.theta.values()) {
            *acc += w * v;
        }
    }
    ThetaVector::new(d, theta)
}

/// Convex weights over the extreme points reproducing a pmf, together with
/// the max-norm reconstruction error.
#[derive(Debug, Clone)]
pub struct ConvexDecomposition {
    pub weights: Vec<f64>,
    pub residual: f64,
}

/// Decompose a sum pmf over the extreme points of its polytope.
///
/// The decomposition is not unique; among the feasible weight vectors this
/// returns the one of minimum Euclidean norm, computed by an active-set
/// nonnegative least-squares pass (least-distance programming form) with ties
/// broken by lexicographic vertex order. Infeasibility cannot occur for a
/// valid pmf and is reported as an internal numeric failure.
pub fn decompose(p: &NdPmf) -> Result<ConvexDecomposition> {
    let points = enumerate_extreme_points(p.d())?;
    let weights = nnls::min_norm_weights(p, &points)?;
    let d = p.d();
    let mut recon = vec![0.0; d + 1];
    for (w, pt) in weights.iter().zip(&points) {
        for k in 0..=d {
            recon[k] += w * pt.pmf.get(k);
        }
    }
    let residual = recon
        .iter()
        .zip(p.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > TOL_ROUND_TRIP {
        return Err(Error::Numeric(format!(
            "convex decomposition failed to reconstruct the pmf (residual {residual:e})"
        )));
    }
    Ok(ConvexDecomposition { weights, residual })
}
