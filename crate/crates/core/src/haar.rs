//! Haar-random pure states and seeded Monte Carlo estimators.
//!
//! Sample i is generated from a small counter-based generator keyed by
//! (seed, i), so estimates are bit-identical no matter how the index range
//! is split across workers.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::matrix::{Complex64, ComplexMatrix};
use rayon::prelude::*;

const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream; cheap to key per sample index.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for one sample of a seeded run: keyed by (seed, index).
    pub fn for_index(seed: u64, index: u64) -> Self {
        Self::new(seed ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform double in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in (0, 1]; safe to feed into ln.
    fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals via Box-Muller.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let radius = (-2.0 * self.next_open_f64().ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * self.next_f64();
        (radius * angle.cos(), radius * angle.sin())
    }
}

/// Normalized amplitude vector on an n-dimensional register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts a vector whose norm is 1 within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::StateNotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Haar-random pure state: 2n i.i.d. normals as components, then normalize.
pub fn sample_haar_state(n: usize, rng: &mut SplitMix64) -> PureState {
    assert!(n > 0, "state dimension must be positive");
    loop {
        let mut amplitudes = Vec::with_capacity(n);
        let mut norm_sq = 0.0f64;
        for _ in 0..n {
            let (re, im) = rng.next_gaussian_pair();
            norm_sq += re * re + im * im;
            amplitudes.push(Complex64::new(re, im));
        }
        if norm_sq > 0.0 {
            let inv = 1.0 / norm_sq.sqrt();
            for z in &mut amplitudes {
                *z *= inv;
            }
            return PureState { amplitudes };
        }
    }
}

/// Haar-random unitary: orthonormalize a complex Gaussian matrix column by
/// column; the positive-diagonal QR convention makes the result Haar.
pub fn sample_haar_unitary(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    assert!(n > 0, "dimension must be positive");
    'draw: loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let (re, im) = rng.next_gaussian_pair();
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        for j in 0..n {
            // Two projection passes keep the basis orthogonal to roundoff.
            for _ in 0..2 {
                for i in 0..j {
                    let overlap: Complex64 = cols[i]
                        .iter()
                        .zip(&cols[j])
                        .map(|(&q, &v)| q.conj() * v)
                        .sum();
                    for r in 0..n {
                        let q = cols[i][r];
                        cols[j][r] -= overlap * q;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-150 {
                continue 'draw;
            }
            let inv = 1.0 / norm;
            for z in &mut cols[j] {
                *z *= inv;
            }
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m.set(i, j, z);
            }
        }
        return m;
    }
}

/// Random trace-preserving channel with the given number of Kraus
/// operators: slices an isometry out of a Haar unitary on dim * operators
/// levels, so completeness holds to roundoff by construction.
pub fn sample_kraus_channel(dim: usize, operators: usize, rng: &mut SplitMix64) -> KrausChannel {
    assert!(dim > 0 && operators > 0, "dimensions must be positive");
    let big = sample_haar_unitary(dim * operators, rng);
    let kraus: Vec<ComplexMatrix> = (0..operators)
        .map(|k| {
            let mut g = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    g.set(i, j, big.get(k * dim + i, j));
                }
            }
            g
        })
        .collect();
    KrausChannel::new(kraus).expect("isometry slices form a valid channel")
}

/// Monte Carlo estimate with its plain sample standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Number of samples the CLI and the test suite use by default.
pub const DEFAULT_SAMPLES: u64 = 100_000;

fn estimate_from(values: Vec<f64>, samples: u64, seed: u64) -> McEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
        seed,
    }
}

/// Estimates the Haar average of |<psi|M|psi>|^2.
pub fn mc_quadratic_form_average(m: &ComplexMatrix, samples: u64, seed: u64) -> Result<McEstimate> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if samples < 2 {
        return Err(Error::TooFewSamples { samples });
    }
    let n = m.rows();
    let values: Vec<f64> = (0..samples as usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix64::for_index(seed, i as u64);
            let psi = sample_haar_state(n, &mut rng);
            m.expectation(psi.amplitudes()).norm_sqr()
        })
        .collect();
    Ok(estimate_from(values, samples, seed))
}

/// Estimates the Haar-average channel fidelity sum_k |<psi|U0† G_k|psi>|^2.
pub fn mc_channel_fidelity(
    target: &ComplexMatrix,
    channel: &KrausChannel,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    target.require_unitary(1e-9)?;
    if target.rows() != channel.dim() {
        return Err(Error::DimensionMismatch {
            left: target.rows(),
            right: channel.dim(),
        });
    }
    if samples < 2 {
        return Err(Error::TooFewSamples { samples });
    }
    let adjoint = target.adjoint();
    let composed: Vec<ComplexMatrix> = channel
        .operators()
        .iter()
        .map(|g| adjoint.multiply(g).expect("dimensions checked"))
        .collect();
    let n = channel.dim();
    let values: Vec<f64> = (0..samples as usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix64::for_index(seed, i as u64);
            let psi = sample_haar_state(n, &mut rng);
            composed
                .iter()
                .map(|mk| mk.expectation(psi.amplitudes()).norm_sqr())
                .sum()
        })
        .collect();
    Ok(estimate_from(values, samples, seed))
}
