//! Exact cdf, density and log-likelihood evaluation in O(d^2) per point.
//!
//! The stochastic representation writes both the cdf and the density as an
//! expectation over the Bernoulli vector of a product with one factor per
//! margin, the factor depending only on the coordinate's bit. Exchangeability
//! groups the 2^d terms by the bit count k, leaving the degree-graded sums
//! `S_k = sum_{|I| = k} prod_{m in I} b_m prod_{m not in I} a_m`, which one
//! polynomial-product pass computes for all k at once. The evaluated value is
//! then `sum_k p_k S_k / C(d, k)`.

use crate::binom::{binomial, ln_binomial};
use crate::error::{Error, Result};
use crate::representations::{CopulaModel, NdPmf};

/// An evaluation point in `[0, 1]^d`. The cdf accepts the closed cube; the
/// density needs the open interior.
#[derive(Debug, Clone)]
pub struct Point {
    u: Vec<f64>,
}

impl Point {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "point must have at least 2 coordinates, got {}",
                u.len()
            )));
        }
        for (j, v) in u.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidInput(format!(
                    "coordinate u_{j} = {v} lies outside [0, 1]"
                )));
            }
        }
        Ok(Point { u })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn is_interior(&self) -> bool {
        self.u.iter().all(|v| *v > 0.0 && *v < 1.0)
    }
}

/// Degree-graded symmetric sums of per-margin factor pairs.
///
/// `values[k] * 2^log2_scale` is `S_k`; the scale stays zero unless a
/// coefficient left the comfortable `f64` range mid-computation (possible
/// only for dimensions in the thousands).
#[derive(Debug, Clone)]
pub struct SymmetricWeights {
    values: Vec<f64>,
    log2_scale: i64,
}

impl SymmetricWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log2_scale(&self) -> i64 {
        self.log2_scale
    }

    /// `S_k / C(d, k)` for all k, undoing the scale.
    pub(crate) fn per_subset_averages(&self) -> Vec<f64> {
        let d = self.values.len() - 1;
        if self.log2_scale == 0 && d <= 1000 {
            (0..=d).map(|k| self.values[k] / binomial(d, k)).collect()
        } else {
            let shift = self.log2_scale as f64 * std::f64::consts::LN_2;
            (0..=d)
                .map(|k| {
                    let v = self.values[k];
                    if v == 0.0 {
                        0.0
                    } else {
                        v.signum() * (v.abs().ln() + shift - ln_binomial(d, k)).exp()
                    }
                })
                .collect()
        }
    }
}

/// Compute all `S_k` by the iterative polynomial update
/// `P(x) <- P(x) (a_m + b_m x)`, O(d^2) total. Equals the brute-force 2^d
/// subset sum.
pub fn symmetric_weight_dp(a: &[f64], b: &[f64]) -> Result<SymmetricWeights> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "factor sequences differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let d = a.len();
    if d > 10_000 {
        return Err(Error::Capability(format!(
            "symmetric weights supported up to d = 10000, got {d}"
        )));
    }
    let mut s = vec![0.0f64; d + 1];
    s[0] = 1.0;
    let mut log2_scale = 0i64;
    for m in 0..d {
        for k in (0..=m + 1).rev() {
            let carry = if k > 0 { s[k - 1] * b[m] } else { 0.0 };
            s[k] = s[k] * a[m] + carry;
        }
        let max = s.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if max > 1e300 || (max > 0.0 && max < 1e-300) {
            let e = max.log2().round() as i64;
            let factor = (2.0f64).powi(-e as i32);
            for v in s.iter_mut() {
                *v *= factor;
            }
            log2_scale += e;
        }
    }
    Ok(SymmetricWeights { values: s, log2_scale })
}

pub(crate) fn cdf_on_pmf(p: &NdPmf, u: &[f64]) -> f64 {
    let a: Vec<f64> = u.iter().map(|x| x * (2.0 - x)).collect();
    let b: Vec<f64> = u.iter().map(|x| x * x).collect();
    let sw = symmetric_weight_dp(&a, &b).expect("factor lengths match");
    mixture_value(p, &sw)
}

pub(crate) fn density_on_pmf(p: &NdPmf, u: &[f64]) -> f64 {
    let base = density_subset_averages(u);
    (0..=p.d()).map(|k| p.get(k) * base[k]).sum()
}

/// Density building blocks `S_k / C(d, k)` for one observation; reusable
/// across models sharing the dimension (the estimation module dots them with
/// each vertex's two-point support).
pub(crate) fn density_subset_averages(u: &[f64]) -> Vec<f64> {
    let a: Vec<f64> = u.iter().map(|x| 2.0 * (1.0 - x)).collect();
    let b: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
    let sw = symmetric_weight_dp(&a, &b).expect("factor lengths match");
    sw.per_subset_averages()
}

fn mixture_value(p: &NdPmf, sw: &SymmetricWeights) -> f64 {
    let base = sw.per_subset_averages();
    (0..=p.d()).map(|k| p.get(k) * base[k]).sum()
}

/// Copula cdf at a point of the closed cube.
pub fn copula_cdf(model: &CopulaModel, pt: &Point) -> Result<f64> {
    let pmf = model.canonical_pmf()?;
    if pt.len() != pmf.d() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, model dimension is {}",
            pt.len(),
            pmf.d()
        )));
    }
    Ok(cdf_on_pmf(&pmf, pt.values()))
}

/// Copula density at an interior point.
pub fn copula_density(model: &CopulaModel, pt: &Point) -> Result<f64> {
    let pmf = model.canonical_pmf()?;
    if pt.len() != pmf.d() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, model dimension is {}",
            pt.len(),
            pmf.d()
        )));
    }
    if !pt.is_interior() {
        return Err(Error::InvalidInput(
            "density needs a strictly interior point of (0, 1)^d".into(),
        ));
    }
    Ok(density_on_pmf(&pmf, pt.values()))
}

/// Log-likelihood of strictly interior observation rows. A nonpositive
/// density (an inadmissible model on that row) is an explicit error naming
/// the row, never a silent `-inf`.
pub fn log_likelihood(model: &CopulaModel, data: &[Vec<f64>]) -> Result<f64> {
    let pmf = model.canonical_pmf()?;
    let d = pmf.d();
    let mut total = 0.0;
    for (row, u) in data.iter().enumerate() {
        if u.len() != d {
            return Err(Error::InvalidInput(format!(
                "observation row {row} has {} columns, expected {d}",
                u.len()
            )));
        }
        if u.iter().any(|v| !v.is_finite() || *v <= 0.0 || *v >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "observation row {row} is not strictly inside (0, 1)^d"
            )));
        }
        let c = density_on_pmf(&pmf, u);
        if !(c > 0.0) {
            return Err(Error::NonpositiveDensity { row, value: c });
        }
        total += c.ln();
    }
    Ok(total)
}
