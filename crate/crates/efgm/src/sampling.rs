//! Exact stochastic sampling through the Bernoulli representation.
//!
//! Each row draws the latent sum, scatters that many ones uniformly over the
//! coordinates, and then turns every coordinate into a uniform variate:
//! `U_j = sqrt(V0) * V1^(1 - I_j)` with fresh `V0, V1 ~ Unif(0, 1)`. A one
//! bit therefore yields the max-type conditional cdf `u^2` and a zero bit the
//! min-type `2u - u^2`, matching the sign convention of the dependence
//! parameters; the mixture of the two restores exact uniform margins.
//!
//! Reproducibility contract: the generator is ChaCha12 seeded with
//! `seed_from_u64`; rows are produced in shards of 1024, shard `s` running on
//! stream `s` of the same seed, so output is identical for any thread count.
//! Within a row the draw order is fixed: the sum, then one index draw per
//! placed one (partial Fisher-Yates), then `(V0, V1)` per coordinate in
//! coordinate order. Changing any of this is a breaking change.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Beta as BetaDist, Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::symmetric_weight_dp;
use crate::representations::{CopulaModel, MixingSpec, NdPmf};
use crate::binom::binomial;

const SHARD_SIZE: usize = 1024;
/// Batches above this row count use the alias method for the sum draws;
/// smaller ones walk the inverse cdf.
const ALIAS_THRESHOLD: usize = 10_000;

/// A seeded batch of copula samples, rows in `(0, 1)^d`.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub rows: Vec<Vec<f64>>,
    pub seed: u64,
    pub model: CopulaModel,
}

impl SampleBatch {
    pub fn d(&self) -> usize {
        self.model.d()
    }
}

enum NdSampler {
    Inverse { cum: Vec<f64> },
    Alias { prob: Vec<f64>, alias: Vec<usize> },
}

impl NdSampler {
    fn new(p: &NdPmf, n_rows: usize) -> Self {
        if n_rows > ALIAS_THRESHOLD {
            let (prob, alias) = alias_table(p.values());
            NdSampler::Alias { prob, alias }
        } else {
            let mut cum = Vec::with_capacity(p.d() + 1);
            let mut acc = 0.0;
            for k in 0..=p.d() {
                acc += p.get(k);
                cum.push(acc);
            }
            NdSampler::Inverse { cum }
        }
    }

    fn draw(&self, rng: &mut ChaCha12Rng) -> usize {
        match self {
            NdSampler::Inverse { cum } => {
                let u: f64 = rng.random();
                cum.iter().position(|c| u < *c).unwrap_or(cum.len() - 1)
            }
            NdSampler::Alias { prob, alias } => {
                let j = rng.random_range(0..prob.len());
                let coin: f64 = rng.random();
                if coin < prob[j] {
                    j
                } else {
                    alias[j]
                }
            }
        }
    }
}

/// Vose alias table; construction is deterministic (stacks filled in index
/// order).
fn alias_table(p: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = p.len();
    let mut prob = vec![0.0f64; n];
    let mut alias = vec![0usize; n];
    let mut scaled: Vec<f64> = p.iter().map(|v| v * n as f64).collect();
    let mut small = Vec::with_capacity(n);
    let mut large = Vec::with_capacity(n);
    for (i, s) in scaled.iter().enumerate() {
        if *s < 1.0 {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        prob[s] = scaled[s];
        alias[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if scaled[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    for &i in small.iter().chain(large.iter()) {
        prob[i] = 1.0;
    }
    (prob, alias)
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

fn draw_open01(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let x: f64 = rng.random();
        if x > 0.0 {
            return x;
        }
    }
}

/// One row given its latent sum: scatter the ones, then transform.
fn finish_row(rng: &mut ChaCha12Rng, d: usize, nd: usize, scratch: &mut Vec<usize>) -> Vec<f64> {
    scratch.clear();
    scratch.extend(0..d);
    for t in 0..nd {
        let j = t + rng.random_range(0..d - t);
        scratch.swap(t, j);
    }
    let mut is_one = vec![false; d];
    for &i in &scratch[..nd] {
        is_one[i] = true;
    }
    let mut row = Vec::with_capacity(d);
    for j in 0..d {
        let v0 = draw_open01(rng);
        let v1 = draw_open01(rng);
        row.push(v0.sqrt() * if is_one[j] { 1.0 } else { v1 });
    }
    row
}

/// Sample `n` rows from any copula model. Same `(model, n, seed)` reproduces
/// the batch bit for bit.
pub fn sample(model: &CopulaModel, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let pmf = model.canonical_pmf()?;
    let d = pmf.d();
    let sampler = NdSampler::new(&pmf, n);
    let shards = n.div_ceil(SHARD_SIZE);
    let rows: Vec<Vec<f64>> = (0..shards)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut rng = shard_rng(seed, s as u64);
            let count = SHARD_SIZE.min(n - s * SHARD_SIZE);
            let mut scratch = Vec::with_capacity(d);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let nd = sampler.draw(&mut rng);
                out.push(finish_row(&mut rng, d, nd, &mut scratch));
            }
            out
        })
        .collect();
    Ok(SampleBatch { rows, seed, model: model.clone() })
}

/// Sampling shortcut for mixture families: per row, draw the mixer value,
/// then the latent sum from Binomial(d, mixer), then proceed as in [`sample`].
/// Distributionally identical to sampling the canonicalized model.
pub fn sample_mixture(spec: &MixingSpec, n: usize, d: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension d = {d} must be >= 2")));
    }
    enum Mixer {
        Beta(BetaDist<f64>),
        TwoPoint { low: f64, weight_high: f64 },
    }
    let mixer = match spec {
        MixingSpec::Beta { alpha } => {
            let dist = BetaDist::new(*alpha, *alpha)
                .map_err(|e| Error::InvalidInput(format!("beta mixer: {e}")))?;
            Mixer::Beta(dist)
        }
        MixingSpec::Madsen { beta } => {
            spec.validate()?;
            let low = if (beta - 0.5).abs() <= crate::TOL_EQ {
                0.0
            } else {
                (0.5 - beta) / (1.0 - beta)
            };
            Mixer::TwoPoint { low, weight_high: *beta }
        }
        MixingSpec::Lst(_) | MixingSpec::Moments { .. } => {
            return Err(Error::Capability(
                "mixture sampling needs a mixer with random draws; only beta and madsen provide one"
                    .into(),
            ))
        }
    };
    let shards = n.div_ceil(SHARD_SIZE);
    let rows: Vec<Vec<f64>> = (0..shards)
        .into_par_iter()
        .map(|s| -> Result<Vec<Vec<f64>>> {
            let mut rng = shard_rng(seed, s as u64);
            let count = SHARD_SIZE.min(n - s * SHARD_SIZE);
            let mut scratch = Vec::with_capacity(d);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let lambda = match &mixer {
                    Mixer::Beta(dist) => dist.sample(&mut rng),
                    Mixer::TwoPoint { low, weight_high } => {
                        let u: f64 = rng.random();
                        if u < *weight_high {
                            1.0
                        } else {
                            *low
                        }
                    }
                };
                let nd = Binomial::new(d as u64, lambda.clamp(0.0, 1.0))
                    .map_err(|e| Error::Numeric(format!("binomial draw: {e}")))?
                    .sample(&mut rng) as usize;
                out.push(finish_row(&mut rng, d, nd, &mut scratch));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(SampleBatch { rows, seed, model: CopulaModel::Mixing { spec: spec.clone(), d } })
}

/// Method-of-moments diagnostic: `3^k` times the average, over all rows and
/// all size-k coordinate subsets, of `prod (1 - 2 U_j)`. Its expectation is
/// `theta_k` (each coordinate contributes a conditional mean of -+1/3).
pub fn empirical_theta(batch: &SampleBatch, k: usize) -> Result<f64> {
    let d = batch.d();
    if !(2..=d).contains(&k) {
        return Err(Error::InvalidInput(format!("need 2 <= k <= d = {d}, got k = {k}")));
    }
    if batch.rows.is_empty() {
        return Err(Error::InvalidInput("empty sample batch".into()));
    }
    let ones = vec![1.0f64; d];
    let ck = binomial(d, k);
    let per_row: Vec<f64> = batch
        .rows
        .par_iter()
        .map(|row| {
            let w: Vec<f64> = row.iter().map(|u| 1.0 - 2.0 * u).collect();
            let sw = symmetric_weight_dp(&ones, &w).expect("factor lengths match");
            sw.values()[k] / ck
        })
        .collect();
    let mean = per_row.iter().sum::<f64>() / per_row.len() as f64;
    Ok(3.0f64.powi(k as i32) * mean)
}
