//! Binomial coefficients and the signed binomial convolutions used by the
//! constraint margins.
//!
//! Coefficients are computed as exact `u128` integers up to `n = 120` and
//! converted to `f64`; beyond that a log-gamma fallback kicks in.

use statrs::function::gamma::ln_gamma;

const EXACT_LIMIT: usize = 120;

/// Binomial coefficient C(n, k) as an `f64`. Returns 0 for `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_LIMIT {
        binomial_u128(n, k) as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// Natural log of C(n, k). `k > n` yields negative infinity.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // Exact: c * (n - i) is always divisible by (i + 1) at this point.
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Coefficients of (1 - x)^m (1 + x)^(d - m), indexed by degree 0..=d.
///
/// Entry k is the value every sign pattern with m minus-ones produces when the
/// k-th elementary symmetric sum of (eps_1, ..., eps_d) is evaluated, which is
/// what collapses the 2^d sign constraints to d + 1 margins.
pub fn krawtchouk_row(d: usize, m: usize) -> Vec<f64> {
    debug_assert!(m <= d);
    let mut poly = vec![0.0f64; d + 1];
    poly[0] = 1.0;
    let mut deg = 0usize;
    for _ in 0..m {
        for k in (0..=deg + 1).rev() {
            let lower = if k > 0 { -poly[k - 1] } else { 0.0 };
            poly[k] = poly[k] + lower;
        }
        deg += 1;
    }
    for _ in 0..(d - m) {
        for k in (0..=deg + 1).rev() {
            let lower = if k > 0 { poly[k - 1] } else { 0.0 };
            poly[k] = poly[k] + lower;
        }
        deg += 1;
    }
    poly
}
