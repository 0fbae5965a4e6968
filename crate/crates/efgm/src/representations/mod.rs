//! The equivalent parameterizations of an exchangeable FGM copula and the
//! conversions between them.
//!
//! A d-variate exchangeable FGM copula is pinned down by any one of:
//!
//! * the dependence parameters `(theta_2, ..., theta_d)` ([`ThetaVector`]),
//! * the joint success probabilities `(zeta_0, ..., zeta_d)` of the
//!   underlying exchangeable symmetric Bernoulli vector ([`ZetaVector`]),
//! * the probability mass function of the Bernoulli sum `N_d`, a pmf on
//!   `{0, ..., d}` with mean `d/2` ([`NdPmf`]),
//! * a mixing distribution on `[0, 1]` with mean `1/2`
//!   ([`MixingSpec`](mixing::MixingSpec)).
//!
//! The canonical internal representation is `(d, NdPmf)`: it is minimal and
//! makes admissibility a plain nonnegativity check.

mod mixing;
mod model;

pub use mixing::{
    beta_family_theta, beta_family_theta_gamma, mixing_to_zeta, theta_from_mixing, LstSpec,
    MixingSpec,
};
pub use model::CopulaModel;

use crate::binom::{binomial, krawtchouk_row};
use crate::error::{Error, Result};
use crate::{NEG_PROB_CLAMP, TOL_EQ};

/// Dependence parameters `(theta_2, ..., theta_d)` of a d-variate
/// exchangeable FGM copula.
///
/// Construction checks shape and the necessary bound `|theta_k| <= 1` is *not*
/// enforced here: deciding admissibility is the geometry module's job, and the
/// checks there need to be able to hold an out-of-range candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaVector {
    d: usize,
    theta: Vec<f64>,
}

impl ThetaVector {
    pub fn new(d: usize, theta: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
        }
        if theta.len() != d - 1 {
            return Err(Error::InvalidInput(format!(
                "theta must have d - 1 = {} entries, got {}",
                d - 1,
                theta.len()
            )));
        }
        if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite theta entry {v}")));
        }
        Ok(ThetaVector { d, theta })
    }

    /// The independence parameter vector (all zeros).
    pub fn zeros(d: usize) -> Result<Self> {
        ThetaVector::new(d, vec![0.0; d - 1])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `theta_k` for `k` in `2..=d`.
    pub fn get(&self, k: usize) -> f64 {
        assert!((2..=self.d).contains(&k), "k = {k} out of range 2..={}", self.d);
        self.theta[k - 2]
    }

    /// The raw entries, index 0 holding `theta_2`.
    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    pub fn max_abs_diff(&self, other: &ThetaVector) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Joint success probabilities `zeta_k = Pr(I_1 = ... = I_k = 1)` for
/// `k = 0..=d`, with `zeta_0 = 1` and `zeta_1 = 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaVector {
    d: usize,
    zeta: Vec<f64>,
}

impl ZetaVector {
    /// Validates shape, the pinned first entries and monotonicity, all within
    /// an absolute tolerance of 1e-12; `zeta_0` and `zeta_1` are then snapped
    /// to their exact values.
    pub fn new(d: usize, mut zeta: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
        }
        if zeta.len() != d + 1 {
            return Err(Error::InvalidInput(format!(
                "zeta must have d + 1 = {} entries, got {}",
                d + 1,
                zeta.len()
            )));
        }
        if (zeta[0] - 1.0).abs() > TOL_EQ {
            return Err(Error::InvalidInput(format!("zeta_0 must equal 1, got {}", zeta[0])));
        }
        if (zeta[1] - 0.5).abs() > TOL_EQ {
            return Err(Error::InvalidInput(format!("zeta_1 must equal 1/2, got {}", zeta[1])));
        }
        zeta[0] = 1.0;
        zeta[1] = 0.5;
        for k in 0..d {
            if zeta[k + 1] > zeta[k] + TOL_EQ {
                return Err(Error::InvalidInput(format!(
                    "zeta must be nonincreasing: zeta_{} = {} > zeta_{} = {}",
                    k + 1,
                    zeta[k + 1],
                    k,
                    zeta[k]
                )));
            }
        }
        for (k, v) in zeta.iter().enumerate() {
            if !v.is_finite() || *v < NEG_PROB_CLAMP {
                return Err(Error::InvalidInput(format!("zeta_{k} = {v} is not a probability")));
            }
        }
        for v in zeta.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(ZetaVector { d, zeta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `zeta_k` for `k` in `0..=d`.
    pub fn get(&self, k: usize) -> f64 {
        self.zeta[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.zeta
    }
}

/// Pmf `(p_0, ..., p_d)` of the Bernoulli sum `N_d`; the class of such pmfs
/// with mean `d/2` is in bijection with exchangeable symmetric Bernoulli laws.
#[derive(Debug, Clone, PartialEq)]
pub struct NdPmf {
    d: usize,
    p: Vec<f64>,
}

impl NdPmf {
    /// Validates length, nonnegativity (values in `(-1e-12, 0)` are clamped to
    /// zero), unit total mass and the mean-`d/2` constraint, both within 1e-12.
    pub fn new(d: usize, mut p: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
        }
        if p.len() != d + 1 {
            return Err(Error::InvalidInput(format!(
                "pmf must have d + 1 = {} entries, got {}",
                d + 1,
                p.len()
            )));
        }
        for (k, v) in p.iter_mut().enumerate() {
            if !v.is_finite() || *v < NEG_PROB_CLAMP {
                return Err(Error::InvalidInput(format!("p_{k} = {v} is not a probability")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > TOL_EQ {
            return Err(Error::InvalidInput(format!("pmf sums to {total}, expected 1")));
        }
        let mean: f64 = p.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
        if (mean - d as f64 / 2.0).abs() > TOL_EQ {
            return Err(Error::InvalidInput(format!(
                "pmf mean is {mean}, expected d/2 = {}",
                d as f64 / 2.0
            )));
        }
        Ok(NdPmf { d, p })
    }

    /// Binomial(d, 1/2), the independence case.
    pub fn binomial_half(d: usize) -> Result<Self> {
        let scale = 0.5f64.powi(d as i32);
        let p = (0..=d).map(|k| binomial(d, k) * scale).collect();
        NdPmf::new(d, p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `Pr(N_d = k)`.
    pub fn get(&self, k: usize) -> f64 {
        self.p[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn max_abs_diff(&self, other: &NdPmf) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Dependence parameters from joint success probabilities:
/// `theta_k = sum_l C(k, l) zeta_l (-2)^l`.
pub fn zeta_to_theta(z: &ZetaVector) -> ThetaVector {
    let d = z.d();
    let theta = (2..=d)
        .map(|k| {
            (0..=k)
                .map(|l| binomial(k, l) * z.get(l) * (-2.0f64).powi(l as i32))
                .sum()
        })
        .collect();
    ThetaVector { d, theta }
}

/// Sum pmf from joint success probabilities:
/// `Pr(N_d = k) = C(d, k) sum_l (-1)^l C(d-k, l) zeta_{k+l}`.
///
/// A computed probability below `-1e-12` means the zeta vector does not come
/// from any exchangeable Bernoulli law and is rejected.
pub fn nd_pmf_from_zeta(z: &ZetaVector) -> Result<NdPmf> {
    let d = z.d();
    let mut p = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut s = 0.0;
        for l in 0..=(d - k) {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binomial(d - k, l) * z.get(k + l);
        }
        let v = binomial(d, k) * s;
        if v < NEG_PROB_CLAMP {
            return Err(Error::InadmissibleZeta { k, value: v });
        }
        p.push(v.max(0.0));
    }
    NdPmf::new(d, p)
}

/// Joint success probabilities from the sum pmf:
/// `zeta_k = sum_m p_m C(m, k) / C(d, k)` (exchangeability).
pub fn zeta_from_nd_pmf(p: &NdPmf) -> ZetaVector {
    let d = p.d();
    let mut zeta = Vec::with_capacity(d + 1);
    zeta.push(1.0);
    zeta.push(0.5);
    for k in 2..=d {
        let ck = binomial(d, k);
        let v: f64 = (k..=d).map(|m| p.get(m) * binomial(m, k) / ck).sum();
        zeta.push(v);
    }
    ZetaVector { d, zeta }
}

/// Pointwise pmf of the Bernoulli vector: `Pr(I = bits) = Pr(N_d = s) / C(d, s)`
/// where `s` is the number of ones in `bits`.
pub fn bernoulli_pmf_point(p: &NdPmf, bits: &[bool]) -> Result<f64> {
    if bits.len() != p.d() {
        return Err(Error::InvalidInput(format!(
            "bit vector has length {}, expected d = {}",
            bits.len(),
            p.d()
        )));
    }
    let s = bits.iter().filter(|b| **b).count();
    Ok(p.get(s) / binomial(p.d(), s))
}

/// Dependence parameters from the sum pmf, via the zeta composition.
pub fn theta_from_nd_pmf(p: &NdPmf) -> ThetaVector {
    zeta_to_theta(&zeta_from_nd_pmf(p))
}

/// Brute-force dependence parameters: the exact expectation
/// `theta_k = (-2)^k E{prod_{j<=k} (I_j - 1/2)}` over all 2^d outcomes.
///
/// Exponential cost, so `d` is capped at 20. Used as the independent oracle
/// for [`theta_from_nd_pmf`].
pub fn theta_oracle(p: &NdPmf) -> Result<ThetaVector> {
    let d = p.d();
    if d > 20 {
        return Err(Error::Capability(format!(
            "theta_oracle enumerates 2^d outcomes; d = {d} exceeds the cap of 20"
        )));
    }
    let mut theta = vec![0.0f64; d - 1];
    for i in 0u32..(1u32 << d) {
        let f = p.get(i.count_ones() as usize) / binomial(d, i.count_ones() as usize);
        let mut prod = 1.0f64;
        for j in 0..d {
            let bit = (i >> j) & 1;
            prod *= bit as f64 - 0.5;
            if j >= 1 {
                let k = j + 1; // product currently covers coordinates 0..=j
                if k >= 2 {
                    theta[k - 2] += f * (-2.0f64).powi(k as i32) * prod;
                }
            }
        }
    }
    ThetaVector::new(d, theta)
}

/// Second brute-force route for the same quantity, via the sign identity
/// `theta_k = E{(-1)^(I_1 + ... + I_k)}`.
pub fn theta_sign_oracle(p: &NdPmf) -> Result<ThetaVector> {
    let d = p.d();
    if d > 20 {
        return Err(Error::Capability(format!(
            "theta_sign_oracle enumerates 2^d outcomes; d = {d} exceeds the cap of 20"
        )));
    }
    let mut theta = vec![0.0f64; d - 1];
    for i in 0u32..(1u32 << d) {
        let f = p.get(i.count_ones() as usize) / binomial(d, i.count_ones() as usize);
        for k in 2..=d {
            let mask = (1u32 << k) - 1;
            let sign = if (i & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            theta[k - 2] += f * sign;
        }
    }
    ThetaVector::new(d, theta)
}

/// Sum pmf from dependence parameters:
/// `p_m = C(d, m) 2^-d (1 + sum_k theta_k K_k(m))` with `K_k(m)` the signed
/// binomial convolution of the sign constraints.
///
/// Fails with the most violated margin if the parameters are inadmissible.
pub fn theta_to_nd_pmf(t: &ThetaVector) -> Result<NdPmf> {
    let d = t.d();
    let mut margins = Vec::with_capacity(d + 1);
    for m in 0..=d {
        let row = krawtchouk_row(d, m);
        let g: f64 = 1.0 + (2..=d).map(|k| t.get(k) * row[k]).sum::<f64>();
        margins.push(g);
    }
    let (worst_m, worst) = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if *worst < NEG_PROB_CLAMP {
        return Err(Error::Inadmissible { m: worst_m, margin: *worst });
    }
    let scale = 0.5f64.powi(d as i32);
    let p = margins
        .iter()
        .enumerate()
        .map(|(m, g)| binomial(d, m) * scale * g.max(0.0))
        .collect();
    NdPmf::new(d, p)
}

#[cfg(test)]
mod tests;
