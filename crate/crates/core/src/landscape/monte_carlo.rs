//! Seeded Monte Carlo oracles for the population quantities.
//!
//! Samples are drawn in fixed chunks, each from its own stream derived from
//! `(seed, chunk)`, and the chunk sums are combined in chunk order, so the
//! estimates are identical with or without the `parallel` feature.

use crate::error::{check_len, Result};
use crate::linalg::dot;
use crate::measure::NoiseModel;
use crate::par;
use crate::rng::{streams, SeededRng};

use super::spectrum::rank_two_spectrum;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_err: f64,
}

impl MonteCarloEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }
}

fn estimate<S, I, F>(n: usize, init: I, sample: F) -> Result<MonteCarloEstimate>
where
    I: Fn(u64) -> S + Sync + Send,
    F: Fn(&mut S) -> f64 + Sync + Send,
{
    if n == 0 {
        return Err(crate::Error::InvalidArgument("Monte Carlo needs n >= 1".into()));
    }
    let sums = par::map_chunks(n, CHUNK, |chunk, range| {
        let mut state = init(chunk as u64);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            let v = sample(&mut state);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = sums.into_iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n as f64;
    let mean = s / nf;
    let var = if n > 1 { ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate { mean, std_err: (var / nf).sqrt() })
}

fn chunk_rng(seed: u64) -> impl Fn(u64) -> SeededRng + Sync + Send {
    move |chunk| SeededRng::for_chunk(seed, streams::MONTE_CARLO, chunk)
}

/// `E|⟨a, x⟩² − ⟨a, x̄⟩²|` over `a ~ N(0, I_d)`.
pub fn mc_population_value(x: &[f64], xbar: &[f64], n: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_len(xbar.len(), x.len())?;
    let d = x.len();
    estimate(n, chunk_rng(seed), |rng| {
        let a = rng.normal_vec(d);
        let (p, q) = (dot(&a, x), dot(&a, xbar));
        (p * p - q * q).abs()
    })
}

/// `E|v₁λ₁ + v₂λ_d|` over i.i.d. `v₁, v₂ ~ χ²₁`.
pub fn mc_spectral_value(lambda1: f64, lambda_d: f64, n: usize, seed: u64) -> Result<MonteCarloEstimate> {
    estimate(n, chunk_rng(seed), |rng| {
        let (g1, g2) = (rng.normal(), rng.normal());
        (g1 * g1 * lambda1 + g2 * g2 * lambda_d).abs()
    })
}

/// `E|v₁λ₁ + v₂λ_d − δξ|` with `(λ₁, λ_d)` the spectrum of `xxᵀ − x̄x̄ᵀ`,
/// `δ ~ Bernoulli(p_fail)` and `ξ` from the noise model.
///
/// The `v` draws use the same streams as [`mc_spectral_value`]; `δ` and `ξ`
/// use a separate stream, so `p_fail = 0` reproduces it exactly.
pub fn mc_corrupted_population_value(
    x: &[f64],
    xbar: &[f64],
    noise: &NoiseModel,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    noise.validate()?;
    let s = rank_two_spectrum(x, xbar)?;
    let (l1, ld) = (s.lambda_max, s.lambda_min);
    let noise = *noise;
    let spectral = chunk_rng(seed);
    estimate(
        n,
        |chunk| (spectral(chunk), SeededRng::for_chunk(seed, streams::MONTE_CARLO_NOISE, chunk)),
        |(rng, noise_rng)| {
            let (g1, g2) = (rng.normal(), rng.normal());
            let corruption = if noise_rng.bernoulli(noise.p_fail) {
                noise.distribution.sample(noise_rng, noise.scale)
            } else {
                0.0
            };
            (g1 * g1 * l1 + g2 * g2 * ld - corruption).abs()
        },
    )
}
