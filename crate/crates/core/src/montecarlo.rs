//! Sampling oracle for the quotient ensemble, built directly from the
//! matrix model and independent of every analytic formula in the crate.
//!
//! Each draw fills `H_A` (n×nA) and `H_B` (n×nB) with circularly symmetric
//! complex Gaussians of unit total variance (real and imaginary parts
//! `N(0, 1/2)`). With the Cholesky factor `L L† = I + b H_B H_B†`,
//! `W = (I + b H_B H_B†)^{-1} a H_A H_A†` is similar to the Hermitian
//! `a G G†`, `G = L^{-1} H_A`, whose spectrum is computed instead.
//!
//! Sample `i` draws from ChaCha8 stream `i` of the user seed, so the
//! ensemble is bit-reproducible regardless of how the work is scheduled.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::ensemble::ChannelConfig;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_0f_0a_7e;
pub const DEFAULT_COUNT: usize = 200_000;

// eigenvalues below this are roundoff of a positive semidefinite spectrum
const NEGATIVE_SLACK: f64 = -1e-10;

/// Sorted eigenvalue vectors of sampled `W` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct McEnsemble {
    cfg: ChannelConfig,
    seed: u64,
    count: usize,
    // row-major, `count` rows of `n` ascending eigenvalues
    eigenvalues: Vec<f64>,
    redraws: usize,
}

impl McEnsemble {
    pub fn cfg(&self) -> &ChannelConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Number of draws that had to be repeated because the eigensolver
    /// failed or returned a clearly negative eigenvalue.
    pub fn redraws(&self) -> usize {
        self.redraws
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        let n = self.cfg.n as usize;
        &self.eigenvalues[i * n..(i + 1) * n]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.eigenvalues.chunks_exact(self.cfg.n as usize)
    }

    /// Every eigenvalue of every sample, flattened.
    pub fn all_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex<f64>> {
    // column-major fill order is part of the stream discipline
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Eigenvalues of `W` for one realization of the channel matrices.
pub fn quotient_eigenvalues(
    a: f64,
    b: f64,
    h_a: &DMatrix<Complex<f64>>,
    h_b: &DMatrix<Complex<f64>>,
) -> Option<Vec<f64>> {
    let n = h_a.nrows();
    let interference = DMatrix::identity(n, n) + (h_b * h_b.adjoint()) * Complex::from(b);
    let chol = interference.cholesky()?;
    let g = chol.l().solve_lower_triangular(h_a)?;
    let hermitian = (&g * g.adjoint()) * Complex::from(a);
    let eig = SymmetricEigen::try_new(hermitian, f64::EPSILON, 10_000)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite() || *v < NEGATIVE_SLACK) {
        return None;
    }
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    values.sort_by(|x, y| x.total_cmp(y));
    Some(values)
}

fn draw_one(cfg: &ChannelConfig, seed: u64, index: usize) -> (Vec<f64>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let (n, na, nb) = (cfg.n as usize, cfg.n_a as usize, cfg.n_b as usize);
    let mut redraws = 0;
    loop {
        let h_a = gaussian_matrix(&mut rng, n, na);
        let h_b = gaussian_matrix(&mut rng, n, nb);
        if let Some(v) = quotient_eigenvalues(cfg.a, cfg.b, &h_a, &h_b) {
            return (v, redraws);
        }
        redraws += 1;
    }
}

/// Draws `count` independent eigenvalue vectors of `W`.
pub fn sample_eigenvalues(cfg: &ChannelConfig, seed: u64, count: usize) -> Result<McEnsemble> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::Domain("Monte Carlo count must be at least 1".into()));
    }
    let draws: Vec<(Vec<f64>, usize)> = (0..count)
        .into_par_iter()
        .map(|i| draw_one(cfg, seed, i))
        .collect();
    let mut eigenvalues = Vec::with_capacity(count * cfg.n as usize);
    let mut redraws = 0;
    for (v, r) in draws {
        eigenvalues.extend_from_slice(&v);
        redraws += r;
    }
    Ok(McEnsemble {
        cfg: *cfg,
        seed,
        count,
        eigenvalues,
        redraws,
    })
}

/// `I_A = Σ log2(1 + λ_j)` per sample.
pub fn empirical_mi(ens: &McEnsemble) -> Vec<f64> {
    ens.samples().map(mi_of).collect()
}

/// Mutual information of one eigenvalue vector, in bits/s/Hz.
pub fn mi_of(lambdas: &[f64]) -> f64 {
    lambdas.iter().map(|l| l.ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

/// Smallest and largest eigenvalue of every sample.
pub fn extreme_stats(ens: &McEnsemble) -> (Vec<f64>, Vec<f64>) {
    ens.samples().map(|s| (s[0], s[s.len() - 1])).unzip()
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(|x, y| x.total_cmp(y));
    Ok(v)
}

/// Right-continuous empirical CDF `#{v ≤ x} / N` at each grid point.
pub fn empirical_cdf(values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    let v = sorted(values)?;
    let total = v.len() as f64;
    Ok(grid
        .iter()
        .map(|x| v.partition_point(|s| s <= x) as f64 / total)
        .collect())
}

/// Smallest sample value whose empirical CDF reaches `p`.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1], got {p}"
        )));
    }
    let v = sorted(values)?;
    let idx = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    Ok(v[idx])
}

/// Histogram normalized to a density over the bins delimited by `edges`
/// (mass outside the edges counts in the normalization).
pub fn histogram_density(values: &[f64], edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "histogram edges must be strictly ascending".into(),
        ));
    }
    let cdf = empirical_cdf(values, edges)?;
    Ok(cdf
        .windows(2)
        .zip(edges.windows(2))
        .map(|(c, e)| (c[1] - c[0]) / (e[1] - e[0]))
        .collect())
}

/// Sample mean and its standard error.
pub fn mean_and_standard_error(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Unbiased sample variance.
pub fn sample_variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Largest absolute difference between two curves on a shared grid.
pub fn sup_distance(lhs: &[f64], rhs: &[f64]) -> f64 {
    assert_eq!(lhs.len(), rhs.len(), "curves must share a grid");
    lhs.iter()
        .zip(rhs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov statistic of a sample against a continuous CDF.
///
/// `cdf` is evaluated once per sorted sample, so this suits cheap CDFs; for
/// expensive ones compare on a grid with [`sup_distance`].
pub fn ks_statistic<F: FnMut(f64) -> f64>(values: &[f64], mut cdf: F) -> Result<f64> {
    let v = sorted(values)?;
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let f = cdf(*x);
        d.max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    }))
}

/// 95% Kolmogorov band half-width for `count` samples.
pub fn ks_band_95(count: usize) -> f64 {
    1.63 / (count as f64).sqrt()
}
