//! Minimum-norm convex decomposition via least-distance programming.
//!
//! The weight vector solves `min ||w||  s.t.  A w = p, w >= 0` where the
//! columns of `A` are the vertex pmfs (the unit-sum constraint is implied,
//! since every column sums to one). The problem is cast in least-distance
//! form `min ||w|| s.t. G w >= h` with the equalities written as paired
//! inequalities, and solved through the classical reduction to nonnegative
//! least squares: with `E = [G^T; h^T]` and `f = e_{n+1}`, the NNLS residual
//! `r = E u - f` yields `w_j = -r_j / r_{n+1}`.

use super::ExtremePoint;
use crate::error::{Error, Result};
use crate::representations::NdPmf;

/// Dense row-major matrix, just enough structure for the solver below.
struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl Mat {
    fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, a: vec![0.0; rows * cols] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.cols + j] = v;
    }
}

pub(super) fn min_norm_weights(p: &NdPmf, points: &[ExtremePoint]) -> Result<Vec<f64>> {
    let d = p.d();
    let n = points.len();
    let m = n + 2 * (d + 1);

    // G w >= h rows: w_j >= 0, then A w >= p and -A w >= -p.
    // E = [G^T; h^T] is (n + 1) x m.
    let mut e = Mat::zeros(n + 1, m);
    for j in 0..n {
        e.set(j, j, 1.0);
    }
    for k in 0..=d {
        for j in 0..n {
            let a = points[j].pmf.get(k);
            e.set(j, n + k, a);
            e.set(j, n + d + 1 + k, -a);
        }
        e.set(n, n + k, p.get(k));
        e.set(n, n + d + 1 + k, -p.get(k));
    }
    let mut f = vec![0.0; n + 1];
    f[n] = 1.0;

    let u = nnls(&e, &f)?;

    let mut r = vec![0.0; n + 1];
    for i in 0..=n {
        let mut s = -f[i];
        for (j, uj) in u.iter().enumerate() {
            s += e.at(i, j) * uj;
        }
        r[i] = s;
    }
    if r[n] > -1e-12 {
        return Err(Error::Numeric(
            "least-distance step found no feasible decomposition".into(),
        ));
    }
    let mut w: Vec<f64> = (0..n).map(|j| -r[j] / r[n]).collect();
    for v in w.iter_mut() {
        if *v < 0.0 {
            *v = 0.0; // fp dust only; feasibility is re-checked by the caller
        }
    }
    Ok(w)
}

/// Lawson-Hanson active-set nonnegative least squares:
/// `min ||E u - f||, u >= 0`. Ties in the gradient pick the lowest index, so
/// the result is deterministic.
fn nnls(e: &Mat, f: &[f64]) -> Result<Vec<f64>> {
    let (rows, cols) = (e.rows, e.cols);
    let mut x = vec![0.0f64; cols];
    let mut passive = vec![false; cols];
    let tol = 1e-12;

    let resid = |x: &[f64]| -> Vec<f64> {
        (0..rows)
            .map(|i| {
                let mut s = f[i];
                for j in 0..cols {
                    if x[j] != 0.0 {
                        s -= e.at(i, j) * x[j];
                    }
                }
                s
            })
            .collect()
    };

    for _outer in 0..10 * cols.max(8) {
        let r = resid(&x);
        // Gradient of the active (zero) coordinates.
        let mut best: Option<(usize, f64)> = None;
        for j in 0..cols {
            if passive[j] {
                continue;
            }
            let wj: f64 = (0..rows).map(|i| e.at(i, j) * r[i]).sum();
            if wj > tol && best.map_or(true, |(_, bw)| wj > bw) {
                best = Some((j, wj));
            }
        }
        let Some((enter, _)) = best else {
            return Ok(x);
        };
        passive[enter] = true;

        for _inner in 0..10 * cols.max(8) {
            let idx: Vec<usize> = (0..cols).filter(|j| passive[*j]).collect();
            let z = solve_passive(e, f, &idx)?;
            if z.iter().all(|v| *v > tol) {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                for (pos, &j) in idx.iter().enumerate() {
                    x[j] = z[pos];
                }
                break;
            }
            // Step toward z until the first passive coordinate hits zero.
            let mut alpha = f64::INFINITY;
            for (pos, &j) in idx.iter().enumerate() {
                if z[pos] <= tol {
                    let denom = x[j] - z[pos];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                return Err(Error::Numeric("nonnegative least squares stalled".into()));
            }
            for (pos, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[pos] - x[j]);
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    Err(Error::Numeric("nonnegative least squares failed to converge".into()))
}

/// Unconstrained least squares on the passive columns, by normal equations
/// and Gaussian elimination with partial pivoting.
fn solve_passive(e: &Mat, f: &[f64], idx: &[usize]) -> Result<Vec<f64>> {
    let k = idx.len();
    let rows = e.rows;
    let mut gram = vec![0.0f64; k * k];
    let mut rhs = vec![0.0f64; k];
    for a in 0..k {
        for b in a..k {
            let mut s = 0.0;
            for i in 0..rows {
                s += e.at(i, idx[a]) * e.at(i, idx[b]);
            }
            gram[a * k + b] = s;
            gram[b * k + a] = s;
        }
        rhs[a] = (0..rows).map(|i| e.at(i, idx[a]) * f[i]).sum();
    }
    // Partial-pivot elimination.
    let mut perm: Vec<usize> = (0..k).collect();
    for col in 0..k {
        let (pr, pmax) = (col..k)
            .map(|r| (r, gram[perm[r] * k + col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pmax < 1e-14 {
            return Err(Error::Numeric("singular normal equations in NNLS".into()));
        }
        perm.swap(col, pr);
        let prow = perm[col];
        for r in col + 1..k {
            let row = perm[r];
            let factor = gram[row * k + col] / gram[prow * k + col];
            if factor != 0.0 {
                for c in col..k {
                    gram[row * k + c] -= factor * gram[prow * k + c];
                }
                rhs[row] -= factor * rhs[prow];
            }
        }
    }
    let mut z = vec![0.0f64; k];
    for col in (0..k).rev() {
        let row = perm[col];
        let mut s = rhs[row];
        for c in col + 1..k {
            s -= gram[row * k + c] * z[c];
        }
        z[col] = s / gram[row * k + col];
    }
    Ok(z)
}
