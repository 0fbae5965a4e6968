//! Mixing-distribution constructions: a latent variable on `[0, 1]` with mean
//! `1/2` makes the Bernoulli coordinates conditionally i.i.d. and generates a
//! parametric family of exchangeable FGM copulas through its moments.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use super::{ThetaVector, ZetaVector};
use crate::binom::binomial;
use crate::error::{Error, Result};
use crate::TOL_EQ;

/// A completely monotone transform `psi` with `psi(0) = 1`, i.e. the
/// Laplace-Stieltjes transform of a positive random variable. Joint success
/// probabilities come out as `zeta_k = psi(k r)` with `r` solved from
/// `psi(r) = 1/2`.
#[derive(Clone)]
pub struct LstSpec {
    psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl LstSpec {
    pub fn new(psi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let at_zero = psi(0.0);
        if (at_zero - 1.0).abs() > TOL_EQ {
            return Err(Error::InvalidInput(format!(
                "LST transform must satisfy psi(0) = 1, got {at_zero}"
            )));
        }
        Ok(LstSpec { psi: Arc::new(psi) })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.psi)(t)
    }
}

impl fmt::Debug for LstSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LstSpec").finish_non_exhaustive()
    }
}

/// Specification of the mixing distribution `Lambda` on `[0, 1]`.
#[derive(Debug, Clone)]
pub enum MixingSpec {
    /// Symmetric `Beta(alpha, alpha)`, `alpha > 0`.
    Beta { alpha: f64 },
    /// Two-point mixer at `{(1/2 - beta)/(1 - beta), 1}` with weights
    /// `(1 - beta, beta)`, `beta` in `[0, 1/2]`.
    Madsen { beta: f64 },
    /// `Lambda = exp(-r Y)` for a positive `Y` given through its
    /// Laplace-Stieltjes transform.
    Lst(LstSpec),
    /// Raw moments `E[Lambda^k]`, `k = 0..=d_max`.
    Moments { moments: Vec<f64> },
}

impl MixingSpec {
    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            MixingSpec::Beta { alpha } => {
                if !alpha.is_finite() || *alpha <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "beta mixing parameter alpha = {alpha} must be positive"
                    )));
                }
            }
            MixingSpec::Madsen { beta } => {
                if !beta.is_finite() || !(0.0..=0.5).contains(beta) {
                    return Err(Error::InvalidInput(format!(
                        "madsen parameter beta = {beta} must lie in [0, 0.5]"
                    )));
                }
            }
            MixingSpec::Lst(_) => {}
            MixingSpec::Moments { moments } => {
                if moments.len() < 2 {
                    return Err(Error::InvalidInput(
                        "moment list needs at least E[1] and E[Lambda]".into(),
                    ));
                }
                if (moments[0] - 1.0).abs() > TOL_EQ {
                    return Err(Error::InvalidInput(format!(
                        "zeroth moment must be 1, got {}",
                        moments[0]
                    )));
                }
                if (moments[1] - 0.5).abs() > TOL_EQ {
                    return Err(Error::InvalidInput(format!(
                        "mixing mean must be 1/2, got {}",
                        moments[1]
                    )));
                }
                for w in moments.windows(2) {
                    if w[1] > w[0] + TOL_EQ || w[1] < -TOL_EQ {
                        return Err(Error::InvalidInput(
                            "moments of a [0, 1] variable must be nonincreasing and nonnegative"
                                .into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Raw moments `E[Lambda^k]` for `k = 0..=d`.
    pub(crate) fn raw_moments(&self, d: usize) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            MixingSpec::Beta { alpha } => {
                let mut mu = Vec::with_capacity(d + 1);
                mu.push(1.0);
                for k in 1..=d {
                    let prev = mu[k - 1];
                    mu.push(prev * (alpha + (k - 1) as f64) / (2.0 * alpha + (k - 1) as f64));
                }
                Ok(mu)
            }
            MixingSpec::Madsen { beta } => {
                if (beta - 0.5).abs() <= TOL_EQ {
                    // Comonotone limit: exact two-point mixer at {0, 1}.
                    let mut mu = vec![0.5; d + 1];
                    mu[0] = 1.0;
                    return Ok(mu);
                }
                let a = (0.5 - beta) / (1.0 - beta);
                Ok((0..=d)
                    .map(|k| {
                        if k == 0 {
                            1.0
                        } else {
                            beta + (1.0 - beta) * a.powi(k as i32)
                        }
                    })
                    .collect())
            }
            MixingSpec::Lst(spec) => {
                let r = solve_half_point(spec)?;
                Ok((0..=d).map(|k| spec.eval(k as f64 * r)).collect())
            }
            MixingSpec::Moments { moments } => {
                if moments.len() < d + 1 {
                    return Err(Error::InvalidInput(format!(
                        "moment list holds {} entries, need d + 1 = {}",
                        moments.len(),
                        d + 1
                    )));
                }
                Ok(moments[..=d].to_vec())
            }
        }
    }
}

/// Bisection for the rate `r` with `psi(r) = 1/2`. The transform is strictly
/// decreasing, so doubling the upper end is guaranteed to bracket the root;
/// failure to do so within 200 doublings is reported as a numeric error.
fn solve_half_point(spec: &LstSpec) -> Result<f64> {
    let lo0 = 1e-12;
    if spec.eval(lo0) < 0.5 {
        return Err(Error::Numeric(
            "LST root solve: psi already below 1/2 at the lower bracket end".into(),
        ));
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while spec.eval(hi) >= 0.5 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numeric(
                "LST root solve: no sign change on bracket after 200 doublings".into(),
            ));
        }
    }
    let mut lo = lo0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spec.eval(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Joint success probabilities of the mixture: `zeta_k = E[Lambda^k]`.
pub fn mixing_to_zeta(m: &MixingSpec, d: usize) -> Result<ZetaVector> {
    ZetaVector::new(d, m.raw_moments(d)?)
}

/// Dependence parameters of the mixture: `theta_k = (-2)^k E[(Lambda - 1/2)^k]`.
///
/// For the symmetric beta family this uses the gamma-function closed form;
/// other specs go through central moments of the raw moment sequence. Either
/// way the result agrees with `zeta_to_theta(mixing_to_zeta(..))`.
pub fn theta_from_mixing(m: &MixingSpec, d: usize) -> Result<ThetaVector> {
    m.validate()?;
    match m {
        MixingSpec::Beta { alpha } => beta_family_theta_gamma(*alpha, d),
        _ => {
            let mu = m.raw_moments(d)?;
            let theta = (2..=d)
                .map(|k| {
                    let central: f64 = (0..=k)
                        .map(|l| binomial(k, l) * mu[l] * (-0.5f64).powi((k - l) as i32))
                        .sum();
                    (-2.0f64).powi(k as i32) * central
                })
                .collect();
            ThetaVector::new(d, theta)
        }
    }
}

/// Beta-family dependence parameters by the finite product
/// `theta_k = prod_{l=1}^{k/2} (2l - 1) / (2 alpha + 2l - 1)` for even `k`
/// (odd orders vanish: the mixer is symmetric about 1/2).
pub fn beta_family_theta(alpha: f64, d: usize) -> Result<ThetaVector> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let mut theta = Vec::with_capacity(d.saturating_sub(1));
    let mut even_running = 1.0f64;
    for k in 2..=d {
        if k % 2 == 0 {
            let l = (k / 2) as f64;
            even_running *= (2.0 * l - 1.0) / (2.0 * alpha + 2.0 * l - 1.0);
            theta.push(even_running);
        } else {
            theta.push(0.0);
        }
    }
    ThetaVector::new(d, theta)
}

/// The same parameters by the beta-function ratio
/// `theta_k = B(alpha + 1/2, (k+1)/2) / B(alpha + (k+1)/2, 1/2)`, evaluated in
/// log-gamma form. Kept as a second closed-form route; it must match
/// [`beta_family_theta`] to 1e-12.
pub fn beta_family_theta_gamma(alpha: f64, d: usize) -> Result<ThetaVector> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let ln_sqrt_pi = ln_gamma(0.5);
    let theta = (2..=d)
        .map(|k| {
            if k % 2 == 0 {
                let h = (k as f64 + 1.0) / 2.0;
                (ln_gamma(alpha + 0.5) + ln_gamma(h) - ln_gamma(alpha + h) - ln_sqrt_pi).exp()
            } else {
                0.0
            }
        })
        .collect();
    ThetaVector::new(d, theta)
}
