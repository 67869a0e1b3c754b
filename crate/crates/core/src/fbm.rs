//! Exact sampling of fractional Brownian motion on uniform grids.
//!
//! The process is the centered Gaussian process starting from zero with
//!
//! ```text
//! R_H(t, s) = 1/2 (t^{2H} + s^{2H} - |t - s|^{2H})
//! ```
//!
//! Two samplers are provided. The Cholesky route factors the Toeplitz
//! covariance of the stationary increments and is O(n³); the circulant
//! embedding route diagonalizes the same covariance inside a larger
//! circulant matrix with one FFT and is O(n log n). Both are exact in law:
//! increments are generated first and prefix-summed, which pins the path to
//! start at zero.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::numerics::SeededStream;

#[derive(Debug, Error)]
pub enum FbmError {
    #[error("Hurst index must lie in (0, 1), got {0}")]
    HurstOutOfRange(f64),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("covariance matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error(
        "grid size {n} exceeds the Cholesky cap {cap}; use the circulant sampler for large grids"
    )]
    CholeskyCapExceeded { n: usize, cap: usize },
    #[error("circulant sampler requires at least one increment")]
    EmptyGrid,
    #[error(
        "circulant embedding has eigenvalue {min_eigenvalue:.3e} below tolerance \
         {tolerance:.3e}; fall back to the Cholesky sampler"
    )]
    NegativeEigenvalue { min_eigenvalue: f64, tolerance: f64 },
}

/// Hurst index, restricted to (0, 1) at construction.
///
/// Model-level code additionally requires `H > 1/2` (long memory) and the
/// asymptotic-variance constants require `H < 3/4`; those constraints are
/// enforced where they are used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(value: f64) -> Result<Self, FbmError> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(FbmError::HurstOutOfRange(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_long_memory(&self) -> bool {
        self.0 > 0.5
    }
}

/// Uniform grid t_i = i·step for i = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n: usize,
    step: f64,
}

impl TimeGrid {
    pub fn new(n: usize, step: f64) -> Result<Self, FbmError> {
        if step > 0.0 && step.is_finite() {
            Ok(Self { n, step })
        } else {
            Err(FbmError::NonPositiveStep(step))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.n)
    }
}

/// A process path on a uniform grid; `values[0] = 0` always.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl Path {
    pub(crate) fn from_increments(grid: TimeGrid, increments: &[f64]) -> Self {
        debug_assert_eq!(increments.len(), grid.n());
        let mut values = Vec::with_capacity(grid.n() + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for &dx in increments {
            acc += dx;
            values.push(acc);
        }
        Self { grid, values }
    }

    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Covariance R_H(t, s) of fractional Brownian motion.
pub fn fbm_covariance(t: f64, s: f64, hurst: Hurst) -> f64 {
    let two_h = 2.0 * hurst.value();
    0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
}

/// Autocovariance γ(k) of the stationary increment sequence on a grid of
/// the given step: γ(k) = step^{2H}/2 (|k+1|^{2H} + |k-1|^{2H} - 2 k^{2H}).
pub fn fgn_autocovariance(lag: usize, hurst: Hurst, step: f64) -> f64 {
    let two_h = 2.0 * hurst.value();
    let k = lag as f64;
    0.5 * step.powf(two_h)
        * ((k + 1.0).powf(two_h) + (k - 1.0).abs().powf(two_h) - 2.0 * k.powf(two_h))
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix
/// given by `a[i][j]`.
pub fn cholesky_lower(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FbmError> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) {
            return Err(FbmError::NotPositiveDefinite { index: j, pivot: d });
        }
        l[j][j] = d.sqrt();
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    Ok(l)
}

/// Default cap on the Cholesky sampler's grid size.
pub const DEFAULT_CHOLESKY_CAP: usize = 4096;

/// Exact fBm path via Cholesky factorization of the increment covariance.
pub fn sample_fbm_cholesky(
    grid: TimeGrid,
    hurst: Hurst,
    stream: SeededStream,
) -> Result<Path, FbmError> {
    sample_fbm_cholesky_capped(grid, hurst, stream, DEFAULT_CHOLESKY_CAP)
}

/// Cholesky sampler with an explicit grid-size cap.
pub fn sample_fbm_cholesky_capped(
    grid: TimeGrid,
    hurst: Hurst,
    stream: SeededStream,
    cap: usize,
) -> Result<Path, FbmError> {
    let n = grid.n();
    if n > cap {
        return Err(FbmError::CholeskyCapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(Path {
            grid,
            values: vec![0.0],
        });
    }
    let cov: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| fgn_autocovariance(i.abs_diff(j), hurst, grid.step()))
                .collect()
        })
        .collect();
    let l = cholesky_lower(&cov)?;
    let z = stream.normals(n);
    let increments: Vec<f64> = (0..n)
        .map(|i| l[i][..=i].iter().zip(&z).map(|(lij, zj)| lij * zj).sum())
        .collect();
    Ok(Path::from_increments(grid, &increments))
}

/// Relative tolerance below which a negative embedding eigenvalue is an error
/// rather than rounding noise.
const EIGENVALUE_CLIP_RATIO: f64 = 1e-10;

/// Precomputed circulant embedding of the increment covariance for a fixed
/// `(n, H, step)`. Construction performs one FFT; each sample then costs one
/// FFT plus the normal draws, and the sampler can be shared across
/// replications (sampling takes `&self`).
pub struct FgnSampler {
    n: usize,
    m: usize,
    // sqrt(λ_k / M) for k = 0 and k = M/2, sqrt(λ_k / 2M) elsewhere,
    // folded with the increment scale step^H.
    coeff: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnSampler {
    pub fn new(n: usize, hurst: Hurst, step: f64) -> Result<Self, FbmError> {
        if n == 0 {
            return Err(FbmError::EmptyGrid);
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(FbmError::NonPositiveStep(step));
        }
        let m = (2 * n).next_power_of_two();
        let half = m / 2;
        // First row of the circulant matrix: unit-step autocovariances out to
        // lag M/2, mirrored. The step scale is applied to the output instead.
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let lag = if j <= half { j } else { m - j };
                Complex::new(fgn_autocovariance(lag, hurst, 1.0), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);

        let max_eig = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let tolerance = -EIGENVALUE_CLIP_RATIO * max_eig;
        let min_eig = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_eig < tolerance {
            return Err(FbmError::NegativeEigenvalue {
                min_eigenvalue: min_eig,
                tolerance,
            });
        }

        let scale = step.powf(hurst.value());
        let mf = m as f64;
        let coeff: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let lambda = c.re.max(0.0);
                let var = if k == 0 || k == half {
                    lambda / mf
                } else {
                    lambda / (2.0 * mf)
                };
                scale * var.sqrt()
            })
            .collect();

        Ok(Self { n, m, coeff, fft })
    }

    pub fn increment_count(&self) -> usize {
        self.n
    }

    /// Number of standard normal draws consumed per sample.
    pub fn draws_per_sample(&self) -> usize {
        self.m
    }

    /// Map a block of `m` standard normals to `n` fGn increments.
    ///
    /// The map is linear, which the tests exploit to recover the implied
    /// covariance matrix exactly, column by column.
    pub fn increments_from_normals(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.m, "expected {} normals", self.m);
        let half = self.m / 2;
        let mut buf = vec![Complex::new(0.0, 0.0); self.m];
        // Hermitian half-spectrum: real weights at k = 0 and M/2, conjugate
        // pairs elsewhere. Draw order is fixed: z[0], z[1] are the two real
        // modes, then (re, im) per pair.
        buf[0] = Complex::new(self.coeff[0] * z[0], 0.0);
        buf[half] = Complex::new(self.coeff[half] * z[1], 0.0);
        for k in 1..half {
            let u = z[2 * k];
            let v = z[2 * k + 1];
            let w = Complex::new(self.coeff[k] * u, self.coeff[k] * v);
            buf[k] = w;
            buf[self.m - k] = w.conj();
        }
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|c| c.re).collect()
    }

    pub fn sample_increments(&self, stream: SeededStream) -> Vec<f64> {
        self.increments_from_normals(&stream.normals(self.m))
    }
}

/// Exact-in-law fBm path via circulant embedding of the increment
/// covariance, O(n log n) per sample.
pub fn sample_fbm_circulant(
    grid: TimeGrid,
    hurst: Hurst,
    stream: SeededStream,
) -> Result<Path, FbmError> {
    let sampler = FgnSampler::new(grid.n(), hurst, grid.step())?;
    let increments = sampler.sample_increments(stream);
    Ok(Path::from_increments(grid, &increments))
}
