//! Maximum-likelihood estimation as a finite mixture over extreme points.
//!
//! The likelihood of interior observations under any exchangeable FGM copula
//! is a mixture `prod_m sum_j lambda_j xi_mj` where `xi_mj` is the density of
//! extreme point `j` at row `m` and the weights `lambda` are the only free
//! parameters. The `xi` matrix is computed once; the EM fixed point
//! `lambda_t <- (1/m_obs) sum_m lambda_t xi_mt / sum_l lambda_l xi_ml`
//! then climbs the log-likelihood monotonically while staying on the simplex.
//! Only the implied dependence parameters are identified — different weight
//! vectors can give the same copula — so results are compared through theta.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::density_subset_averages;
use crate::geometry::{convex_combination_theta, enumerate_extreme_points, VertexKind};
use crate::representations::{CopulaModel, ThetaVector};
use crate::sampling::sample;

/// Weights below this are frozen at zero; the multiplicative update could
/// never revive them anyway.
const WEIGHT_FLOOR: f64 = 1e-15;

/// Per-row vertex densities, precomputed before the EM loop.
#[derive(Debug, Clone)]
pub struct XiMatrix {
    /// `xi[m][j]`: density of vertex `j` at observation `m`, up to the
    /// per-row rescale recorded in `log_offsets`.
    pub xi: Vec<Vec<f64>>,
    /// Per-row log factors taken out by the normalization guard; they shift
    /// the reported log-likelihood but cancel in the weight updates.
    pub log_offsets: Vec<f64>,
}

impl XiMatrix {
    pub fn n_vertices(&self) -> usize {
        self.xi.first().map_or(0, Vec::len)
    }
}

/// Evaluate every vertex density at every observation row.
///
/// The symmetric-sum building blocks `S_k / C(d, k)` are shared across
/// vertices within a row; each vertex then contributes a dot product with its
/// at-most-two-point support.
pub fn compute_xi(data: &[Vec<f64>], d: usize) -> Result<XiMatrix> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("no observation rows".into()));
    }
    for (m, row) in data.iter().enumerate() {
        if row.len() != d {
            return Err(Error::InvalidInput(format!(
                "observation row {m} has {} columns, expected {d}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite() || *v <= 0.0 || *v >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "observation row {m} is not strictly inside (0, 1)^d"
            )));
        }
    }
    let points = enumerate_extreme_points(d)?;
    let supports: Vec<Vec<(usize, f64)>> = points
        .iter()
        .map(|pt| match pt.kind {
            VertexKind::Pair { j1, j2 } => {
                vec![(j1, pt.pmf.get(j1)), (j2, pt.pmf.get(j2))]
            }
            VertexKind::Center => vec![(d / 2, 1.0)],
        })
        .collect();
    let rows: Vec<(Vec<f64>, f64)> = data
        .par_iter()
        .map(|u| {
            let base = density_subset_averages(u);
            let mut row: Vec<f64> = supports
                .iter()
                .map(|sup| sup.iter().map(|(k, p)| p * base[*k]).sum())
                .collect();
            let max = row.iter().fold(0.0f64, |a, b| a.max(*b));
            let mut offset = 0.0;
            if max > 0.0 && !(1e-100..=1e100).contains(&max) {
                let inv = 1.0 / max;
                row.iter_mut().for_each(|v| *v *= inv);
                offset = max.ln();
            }
            (row, offset)
        })
        .collect();
    let mut xi = Vec::with_capacity(rows.len());
    let mut log_offsets = Vec::with_capacity(rows.len());
    for (row, offset) in rows {
        xi.push(row);
        log_offsets.push(offset);
    }
    Ok(XiMatrix { xi, log_offsets })
}

/// Outcome of an EM fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Mixture weights over the extreme points (not identified; see module
    /// docs).
    pub weights: Vec<f64>,
    /// The implied dependence parameters (identified).
    pub theta: ThetaVector,
    /// Log-likelihood after 0, 1, 2, ... updates; nondecreasing.
    pub loglik_trace: Vec<f64>,
    /// Number of updates performed.
    pub iterations: usize,
    /// Whether the relative log-likelihood change dropped below `tol`.
    pub converged: bool,
}

impl FitResult {
    pub fn loglik(&self) -> f64 {
        *self.loglik_trace.last().unwrap()
    }
}

fn loglik(xi: &XiMatrix, lambda: &[f64]) -> f64 {
    let mut total: f64 = xi.log_offsets.iter().sum();
    for row in &xi.xi {
        let mix: f64 = row.iter().zip(lambda).map(|(x, l)| x * l).sum();
        total += mix.ln();
    }
    total
}

/// Fit the mixture weights by EM, starting from the uniform vector.
///
/// Stops when `|delta loglik| / (1 + |loglik|) < tol` or after `max_iter`
/// updates (the result is still returned, flagged unconverged). Fewer
/// observations than vertices is allowed but leaves the weights heavily
/// underdetermined.
pub fn em_fit(data: &[Vec<f64>], d: usize, tol: f64, max_iter: usize) -> Result<FitResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let xi = compute_xi(data, d)?;
    let points = enumerate_extreme_points(d)?;
    let n_d = points.len();
    let m_obs = xi.xi.len();
    let mut lambda = vec![1.0 / n_d as f64; n_d];
    let mut trace = vec![loglik(&xi, &lambda)];
    let mut converged = false;
    for _ in 0..max_iter {
        let mut acc = vec![0.0f64; n_d];
        for row in &xi.xi {
            let den: f64 = row.iter().zip(&lambda).map(|(x, l)| x * l).sum();
            for (a, x) in acc.iter_mut().zip(row) {
                *a += x / den;
            }
        }
        for (l, a) in lambda.iter_mut().zip(&acc) {
            *l *= a / m_obs as f64;
            if *l < WEIGHT_FLOOR {
                *l = 0.0;
            }
        }
        let total: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= total);
        let ll = loglik(&xi, &lambda);
        if ll.is_nan() {
            return Err(Error::Numeric("EM produced NaN log-likelihood".into()));
        }
        let prev = *trace.last().unwrap();
        trace.push(ll);
        if (ll - prev).abs() / (1.0 + ll.abs()) < tol {
            converged = true;
            break;
        }
    }
    let theta = convex_combination_theta(&lambda, &points)?;
    Ok(FitResult {
        weights: lambda,
        theta,
        iterations: trace.len() - 1,
        loglik_trace: trace,
        converged,
    })
}

/// Rank transform to approximate uniforms: column-wise `rank / (m_obs + 1)`,
/// ties resolved by average rank. A constant column carries no copula
/// information and is rejected.
pub fn pseudo_observations(raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if raw.is_empty() {
        return Err(Error::InvalidInput("no observation rows".into()));
    }
    let cols = raw[0].len();
    if cols == 0 || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("observation rows of unequal length".into()));
    }
    let m = raw.len();
    let mut out = vec![vec![0.0; cols]; m];
    for c in 0..cols {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|a, b| raw[*a][c].partial_cmp(&raw[*b][c]).unwrap());
        if raw[order[0]][c] == raw[order[m - 1]][c] {
            return Err(Error::InvalidInput(format!("column {c} is constant")));
        }
        let mut i = 0;
        while i < m {
            let mut j = i;
            while j + 1 < m && raw[order[j + 1]][c] == raw[order[i]][c] {
                j += 1;
            }
            // Average 1-based rank across the tied run i..=j.
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &row in &order[i..=j] {
                out[row][c] = avg / (m as f64 + 1.0);
            }
            i = j + 1;
        }
    }
    Ok(out)
}

/// Summary statistics of one parameter across replications.
#[derive(Debug, Clone, Copy)]
pub struct ThetaStats {
    pub real: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub iqr: f64,
    pub sd: f64,
}

/// Output of [`simulation_study`]: per-replication estimates plus summaries.
#[derive(Debug, Clone)]
pub struct SimulationStudy {
    pub theta_true: ThetaVector,
    /// `estimates[rep][k - 2]` is the fitted `theta_k` of replication `rep`.
    pub estimates: Vec<Vec<f64>>,
    /// One row per `k = 2..=d`.
    pub summary: Vec<ThetaStats>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rep_seed(seed: u64, rep: usize) -> u64 {
    splitmix64(seed ^ splitmix64(rep as u64 + 1))
}

/// Empirical quantile, linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Repeated sample-then-fit experiment: `reps` batches of `n` rows from the
/// given parameters, each fitted by [`em_fit`] with the default settings
/// (tol 1e-8, at most 10000 iterations). Per-replication seeds derive
/// deterministically from `seed`, so the whole study is reproducible.
pub fn simulation_study(
    theta: &ThetaVector,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<SimulationStudy> {
    if reps == 0 {
        return Err(Error::InvalidInput("need at least one replication".into()));
    }
    let d = theta.d();
    let model = CopulaModel::Theta(theta.clone());
    model.canonical_pmf()?; // reject inadmissible parameters up front
    let mut estimates = Vec::with_capacity(reps);
    for rep in 0..reps {
        let batch = sample(&model, n, rep_seed(seed, rep))?;
        let fit = em_fit(&batch.rows, d, 1e-8, 10_000)?;
        estimates.push(fit.theta.values().to_vec());
    }
    let mut summary = Vec::with_capacity(d - 1);
    for idx in 0..d - 1 {
        let mut col: Vec<f64> = estimates.iter().map(|e| e[idx]).collect();
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = if col.len() > 1 {
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (col.len() - 1) as f64
        } else {
            0.0
        };
        let q1 = quantile(&col, 0.25);
        let q3 = quantile(&col, 0.75);
        summary.push(ThetaStats {
            real: theta.values()[idx],
            q1,
            median: quantile(&col, 0.5),
            mean,
            q3,
            iqr: q3 - q1,
            sd: var.sqrt(),
        });
    }
    Ok(SimulationStudy { theta_true: theta.clone(), estimates, summary })
}
