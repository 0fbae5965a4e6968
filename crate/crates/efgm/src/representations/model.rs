//! A copula model under any of the four parameterizations, normalizable to
//! the canonical `(d, NdPmf)` pair, plus the JSON wire format used by the CLI
//! and bindings.

use serde::Deserialize;

use super::{
    mixing_to_zeta, nd_pmf_from_zeta, theta_from_nd_pmf, theta_to_nd_pmf, MixingSpec, NdPmf,
    ThetaVector, ZetaVector,
};
use crate::error::{Error, Result};

/// An exchangeable FGM copula under whichever parameterization it arrived in.
#[derive(Debug, Clone)]
pub enum CopulaModel {
    Theta(ThetaVector),
    Pmf(NdPmf),
    Zeta(ZetaVector),
    Mixing { spec: MixingSpec, d: usize },
}

impl CopulaModel {
    pub fn d(&self) -> usize {
        match self {
            CopulaModel::Theta(t) => t.d(),
            CopulaModel::Pmf(p) => p.d(),
            CopulaModel::Zeta(z) => z.d(),
            CopulaModel::Mixing { d, .. } => *d,
        }
    }

    /// Normalize to the canonical sum pmf. Fails if the parameters are
    /// inadmissible (theta) or do not define a distribution (zeta, mixing).
    pub fn canonical_pmf(&self) -> Result<NdPmf> {
        match self {
            CopulaModel::Theta(t) => theta_to_nd_pmf(t),
            CopulaModel::Pmf(p) => Ok(p.clone()),
            CopulaModel::Zeta(z) => nd_pmf_from_zeta(z),
            CopulaModel::Mixing { spec, d } => nd_pmf_from_zeta(&mixing_to_zeta(spec, *d)?),
        }
    }

    /// The canonical form as a model. Idempotent: canonicalizing twice gives
    /// the same value as canonicalizing once.
    pub fn canonicalize(&self) -> Result<CopulaModel> {
        Ok(CopulaModel::Pmf(self.canonical_pmf()?))
    }

    /// Dependence parameters of the model.
    pub fn theta(&self) -> Result<ThetaVector> {
        match self {
            CopulaModel::Theta(t) => Ok(t.clone()),
            other => Ok(theta_from_nd_pmf(&other.canonical_pmf()?)),
        }
    }

    /// Parse the JSON model spec:
    /// `{"type": "theta"|"ndpmf"|"zeta"|"beta"|"madsen", "d": int,
    ///   "values": [..] | "alpha": x | "beta": x}`.
    pub fn from_json(text: &str) -> Result<CopulaModel> {
        let raw: RawModelSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("model spec: {e}")))?;
        raw.build()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModelSpec {
    #[serde(rename = "type")]
    kind: String,
    d: usize,
    #[serde(default)]
    values: Option<Vec<f64>>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
}

impl RawModelSpec {
    fn build(self) -> Result<CopulaModel> {
        let need_values = |v: Option<Vec<f64>>| {
            v.ok_or_else(|| Error::InvalidInput("model spec: missing \"values\" array".into()))
        };
        match self.kind.as_str() {
            "theta" => Ok(CopulaModel::Theta(ThetaVector::new(self.d, need_values(self.values)?)?)),
            "ndpmf" => Ok(CopulaModel::Pmf(NdPmf::new(self.d, need_values(self.values)?)?)),
            "zeta" => Ok(CopulaModel::Zeta(ZetaVector::new(self.d, need_values(self.values)?)?)),
            "beta" => {
                let alpha = self.alpha.ok_or_else(|| {
                    Error::InvalidInput("model spec: beta type needs \"alpha\"".into())
                })?;
                if self.d < 2 {
                    return Err(Error::InvalidInput(format!(
                        "dimension d = {} must be >= 2",
                        self.d
                    )));
                }
                let spec = MixingSpec::Beta { alpha };
                spec.validate()?;
                Ok(CopulaModel::Mixing { spec, d: self.d })
            }
            "madsen" => {
                let beta = self.beta.ok_or_else(|| {
                    Error::InvalidInput("model spec: madsen type needs \"beta\"".into())
                })?;
                if self.d < 2 {
                    return Err(Error::InvalidInput(format!(
                        "dimension d = {} must be >= 2",
                        self.d
                    )));
                }
                let spec = MixingSpec::Madsen { beta };
                spec.validate()?;
                Ok(CopulaModel::Mixing { spec, d: self.d })
            }
            other => Err(Error::InvalidInput(format!(
                "model spec: unknown type {other:?} (expected theta, ndpmf, zeta, beta or madsen)"
            ))),
        }
    }
}
