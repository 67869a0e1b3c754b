//! Log-averaged empirical distributions and almost-sure-CLT diagnostics.
//!
//! Given statistics `G_k` recorded at increasing checkpoints `k`, the
//! log-averaged empirical measure puts weight `1/k` on checkpoint `k`. Two
//! normalizations are supported: `harmonic` divides by Σ 1/k over the
//! included checkpoints, giving a proper probability distribution at every
//! finite n, and `log_n` divides by log(max k), which matches the classical
//! normalization and is asymptotically equivalent. When checkpoints are
//! sparse the weights stay `1/k` over the included k only — a documented
//! approximation of the full sum over all k ≤ n.
//!
//! The module also provides the empirical Ibragimov-Lifshits statistic
//! `Δ_n(t) = (1/log n) Σ (1/k)(e^{itG_k} - L(t))` against a limiting
//! characteristic function `L`, and exact checkers for two deterministic
//! inequalities bounding how a ratio `G_k/R_k` (with R_k near 1) or a sum
//! `G_k + R_k` (with R_k near 0) can move a log-averaged CDF away from the
//! standard normal CDF φ.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::std_normal_cdf;

#[derive(Debug, Error, PartialEq)]
pub enum AscltError {
    #[error("checkpoint series must be nonempty")]
    EmptySeries,
    #[error("checkpoint indices must be positive and strictly increasing")]
    BadCheckpoints,
    #[error("log normalizer needs max checkpoint ≥ 2, got {0}")]
    LogNormalizerUndefined(usize),
    #[error("perturbation pair needs equal lengths, got {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("ratio denominators must be positive, got {0} at index {1}")]
    NonPositiveDenominator(f64, usize),
    #[error("perturbation sequences must be nonempty")]
    EmptyPair,
}

/// Statistics `G_k` recorded at strictly increasing checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSeries {
    entries: Vec<(usize, f64)>,
}

impl CheckpointSeries {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, AscltError> {
        if entries.is_empty() {
            return Err(AscltError::EmptySeries);
        }
        if entries[0].0 == 0 {
            return Err(AscltError::BadCheckpoints);
        }
        if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(AscltError::BadCheckpoints);
        }
        Ok(Self { entries })
    }

    /// Dense series with k = 1..=len.
    pub fn dense(values: &[f64]) -> Result<Self, AscltError> {
        Self::new(values.iter().cloned().enumerate().map(|(i, v)| (i + 1, v)).collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn max_checkpoint(&self) -> usize {
        self.entries.last().expect("nonempty").0
    }
}

/// Normalization of the log-averaged measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// Divide by Σ 1/k over included checkpoints (total mass exactly 1).
    Harmonic,
    /// Divide by log(max k); requires max k ≥ 2.
    LogN,
}

impl Normalizer {
    fn weight_total(&self, series: &CheckpointSeries) -> Result<f64, AscltError> {
        match self {
            Normalizer::Harmonic => {
                Ok(series.entries().iter().map(|(k, _)| 1.0 / *k as f64).sum())
            }
            Normalizer::LogN => {
                let n = series.max_checkpoint();
                if n < 2 {
                    return Err(AscltError::LogNormalizerUndefined(n));
                }
                Ok((n as f64).ln())
            }
        }
    }
}

/// A log-averaged empirical distribution with O(log) CDF queries.
#[derive(Debug, Clone)]
pub struct LogAveragedDistribution {
    /// (value, weight) sorted by value.
    sorted: Vec<(f64, f64)>,
    /// prefix[i] = total weight of sorted[..i].
    prefix: Vec<f64>,
    total: f64,
}

impl LogAveragedDistribution {
    pub fn new(series: &CheckpointSeries, normalizer: Normalizer) -> Result<Self, AscltError> {
        normalizer.weight_total(series)?;
        let mut sorted: Vec<(f64, f64)> = series
            .entries()
            .iter()
            .map(|&(k, v)| (v, 1.0 / k as f64))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &(_, w) in &sorted {
            acc += w;
            prefix.push(acc);
        }
        // In harmonic mode, normalize by the same accumulated sum so the
        // upper CDF limit is exactly 1 in floating point.
        let total = match normalizer {
            Normalizer::Harmonic => *prefix.last().expect("nonempty"),
            Normalizer::LogN => (series.max_checkpoint() as f64).ln(),
        };
        Ok(Self {
            sorted,
            prefix,
            total,
        })
    }

    /// Normalized weight of {G_k ≤ z}.
    pub fn cdf(&self, z: f64) -> f64 {
        let idx = self.sorted.partition_point(|&(v, _)| v <= z);
        self.prefix[idx] / self.total
    }

    /// Left limit: normalized weight of {G_k < z}.
    pub fn cdf_left(&self, z: f64) -> f64 {
        let idx = self.sorted.partition_point(|&(v, _)| v < z);
        self.prefix[idx] / self.total
    }

    /// Log-averaged functional (1/W) Σ (1/k) φ(G_k).
    pub fn functional(&self, phi: impl Fn(f64) -> f64) -> f64 {
        self.sorted.iter().map(|&(v, w)| w * phi(v)).sum::<f64>() / self.total
    }

    /// Sup over the grid of the gap to the standard normal CDF, taking both
    /// one-sided values of the empirical CDF at each grid point. Once the
    /// grid contains the data breakpoints, further refinement cannot
    /// increase the result.
    pub fn kolmogorov_distance(&self, z_grid: &[f64]) -> f64 {
        let mut sup: f64 = 0.0;
        for &z in z_grid {
            let target = std_normal_cdf(z);
            sup = sup
                .max((self.cdf(z) - target).abs())
                .max((self.cdf_left(z) - target).abs());
        }
        sup
    }
}

/// Log-averaged CDF at a point; convenience over [`LogAveragedDistribution`].
pub fn log_avg_cdf(
    series: &CheckpointSeries,
    normalizer: Normalizer,
    z: f64,
) -> Result<f64, AscltError> {
    Ok(LogAveragedDistribution::new(series, normalizer)?.cdf(z))
}

/// The standard normal characteristic function e^{-t²/2}.
pub fn std_normal_charfn(t: f64) -> Complex64 {
    Complex64::new((-0.5 * t * t).exp(), 0.0)
}

/// Empirical Ibragimov-Lifshits statistic
/// `Δ_n(t) = (1/log n) Σ (1/k) (e^{itG_k} - L(t))` with `L` the limiting
/// characteristic function. Exactly zero at t = 0.
pub fn il_delta(
    series: &CheckpointSeries,
    t: f64,
    limit_charfn: impl Fn(f64) -> Complex64,
) -> Result<Complex64, AscltError> {
    let n = series.max_checkpoint();
    if n < 2 {
        return Err(AscltError::LogNormalizerUndefined(n));
    }
    let limit = limit_charfn(t);
    let mut sum = Complex64::new(0.0, 0.0);
    for &(k, g) in series.entries() {
        let phase = Complex64::new(0.0, t * g).exp();
        sum += (phase - limit) / k as f64;
    }
    Ok(sum / (n as f64).ln())
}

/// Paired sequences for the perturbation lemmas: `g` are the base
/// statistics, `r` the ratio denominators (near 1) or additive
/// perturbations (near 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPair {
    pub g: Vec<f64>,
    pub r: Vec<f64>,
}

impl PerturbationPair {
    pub fn new(g: Vec<f64>, r: Vec<f64>) -> Result<Self, AscltError> {
        if g.is_empty() {
            return Err(AscltError::EmptyPair);
        }
        if g.len() != r.len() {
            return Err(AscltError::LengthMismatch(g.len(), r.len()));
        }
        Ok(Self { g, r })
    }

    fn len(&self) -> usize {
        self.g.len()
    }
}

/// Floating-point slack added to the inequality right-hand sides.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Outcome of a ratio-perturbation inequality check.
///
/// `lhs = |(1/W) Σ (1/k) 1{G_k ≤ z R_k} - φ(z)|` must not exceed
/// `max(U, V) + tail + ε`, where U and V recenter at z(1∓ε) and the tail
/// term is the normalized weight of {|R_k - 1| ≥ ε}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck {
    pub lhs: f64,
    pub u: f64,
    pub v: f64,
    pub tail_term: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn weights_and_total(len: usize, normalizer: Normalizer) -> Result<(Vec<f64>, f64), AscltError> {
    let weights: Vec<f64> = (1..=len).map(|k| 1.0 / k as f64).collect();
    let total = match normalizer {
        Normalizer::Harmonic => weights.iter().sum(),
        Normalizer::LogN => {
            if len < 2 {
                return Err(AscltError::LogNormalizerUndefined(len));
            }
            (len as f64).ln()
        }
    };
    Ok((weights, total))
}

/// Check the ratio-perturbation bound on one instance (k = 1..=len).
pub fn lemma31_check(
    pair: &PerturbationPair,
    z: f64,
    eps: f64,
    normalizer: Normalizer,
) -> Result<RatioCheck, AscltError> {
    assert!(eps > 0.0, "perturbation scale must be positive");
    if let Some(idx) = pair.r.iter().position(|&r| !(r > 0.0)) {
        return Err(AscltError::NonPositiveDenominator(pair.r[idx], idx));
    }
    let (weights, total) = weights_and_total(pair.len(), normalizer)?;
    let mut ratio_mass = 0.0;
    let mut lo_mass = 0.0;
    let mut hi_mass = 0.0;
    let mut tail_mass = 0.0;
    for i in 0..pair.len() {
        let w = weights[i];
        let g = pair.g[i];
        let r = pair.r[i];
        if g <= z * r {
            ratio_mass += w;
        }
        if g <= z * (1.0 - eps) {
            lo_mass += w;
        }
        if g <= z * (1.0 + eps) {
            hi_mass += w;
        }
        if (r - 1.0).abs() >= eps {
            tail_mass += w;
        }
    }
    let lhs = (ratio_mass / total - std_normal_cdf(z)).abs();
    let u = (lo_mass / total - std_normal_cdf(z * (1.0 - eps))).abs();
    let v = (hi_mass / total - std_normal_cdf(z * (1.0 + eps))).abs();
    let tail_term = tail_mass / total;
    let rhs = u.max(v) + tail_term + eps;
    Ok(RatioCheck {
        lhs,
        u,
        v,
        tail_term,
        rhs,
        holds: lhs <= rhs + CHECK_TOLERANCE,
    })
}

/// Outcome of a sum-perturbation inequality check.
///
/// `lhs = |(1/W) Σ (1/k) 1{G_k + R_k ≤ z} - φ(z)|` must not exceed
/// `max(T, W) + tail + η/√(2π)`, with T and W recentering at z ± η and the
/// tail term the normalized weight of {|R_k| > η}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumCheck {
    pub lhs: f64,
    pub t: f64,
    pub w: f64,
    pub tail_term: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check the sum-perturbation bound on one instance (k = 1..=len).
pub fn lemma32_check(
    pair: &PerturbationPair,
    z: f64,
    eta: f64,
    normalizer: Normalizer,
) -> Result<SumCheck, AscltError> {
    assert!(eta > 0.0, "perturbation scale must be positive");
    let (weights, total) = weights_and_total(pair.len(), normalizer)?;
    let mut sum_mass = 0.0;
    let mut hi_mass = 0.0;
    let mut lo_mass = 0.0;
    let mut tail_mass = 0.0;
    for i in 0..pair.len() {
        let w = weights[i];
        let g = pair.g[i];
        let r = pair.r[i];
        if g + r <= z {
            sum_mass += w;
        }
        if g <= z + eta {
            hi_mass += w;
        }
        if g <= z - eta {
            lo_mass += w;
        }
        if r.abs() > eta {
            tail_mass += w;
        }
    }
    let lhs = (sum_mass / total - std_normal_cdf(z)).abs();
    let t = (hi_mass / total - std_normal_cdf(z + eta)).abs();
    let w = (lo_mass / total - std_normal_cdf(z - eta)).abs();
    let tail_term = tail_mass / total;
    let rhs = t.max(w) + tail_term + eta / (2.0 * std::f64::consts::PI).sqrt();
    Ok(SumCheck {
        lhs,
        t,
        w,
        tail_term,
        rhs,
        holds: lhs <= rhs + CHECK_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dense(values: &[f64]) -> CheckpointSeries {
        CheckpointSeries::dense(values).unwrap()
    }

    #[test]
    fn series_validation() {
        assert_eq!(CheckpointSeries::new(vec![]), Err(AscltError::EmptySeries));
        assert!(CheckpointSeries::new(vec![(0, 1.0)]).is_err());
        assert!(CheckpointSeries::new(vec![(2, 1.0), (2, 0.0)]).is_err());
        assert!(CheckpointSeries::new(vec![(3, 1.0), (2, 0.0)]).is_err());
        assert!(CheckpointSeries::new(vec![(1, 1.0), (5, 0.0)]).is_ok());
    }

    #[test]
    fn cdf_hand_values() {
        let series = dense(&[0.0, 0.0]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        assert_eq!(dist.cdf(1.0), 1.0);
        assert_eq!(dist.cdf(-1.0), 0.0);

        // k ∈ {1, 2}, G = [a, b] with a ≤ z < b: weight (1/1)/(1 + 1/2) = 2/3.
        let series = dense(&[-0.5, 2.0]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        assert!((dist.cdf(0.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_normalizer_requires_two_checkpoints() {
        let series = dense(&[0.0]);
        assert_eq!(
            LogAveragedDistribution::new(&series, Normalizer::LogN).err(),
            Some(AscltError::LogNormalizerUndefined(1))
        );
        assert!(LogAveragedDistribution::new(&series, Normalizer::Harmonic).is_ok());
    }

    #[test]
    fn functional_hand_values() {
        let series = dense(&[0.3, 0.3, 0.3]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        assert!((dist.functional(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((dist.functional(|x| x) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn smoothed_indicator_approaches_cdf() {
        let series = dense(&[-1.0, 0.2, 0.7, 1.5]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        let z = 0.5;
        let cdf = dist.cdf(z);
        let mut prev_gap = f64::INFINITY;
        for sharpness in [10.0, 100.0, 1000.0, 10000.0] {
            let smooth = dist.functional(|x| 1.0 / (1.0 + ((x - z) * sharpness).exp()));
            let gap = (smooth - cdf).abs();
            assert!(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3);
    }

    #[test]
    fn kolmogorov_single_point_mass() {
        let series = dense(&[0.0]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        let grid: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.01).collect();
        let d = dist.kolmogorov_distance(&grid);
        assert!((d - 0.5).abs() < 1e-12, "distance = {d}");
    }

    #[test]
    fn kolmogorov_invariant_under_refinement_past_breakpoints() {
        let series = dense(&[-0.7, 0.1, 0.4, 1.3]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        let mut grid: Vec<f64> = vec![-3.0, -0.7, 0.1, 0.4, 1.3, 3.0];
        let coarse = dist.kolmogorov_distance(&grid);
        for i in 0..600 {
            grid.push(-3.0 + i as f64 * 0.01);
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fine = dist.kolmogorov_distance(&grid);
        assert!((coarse - fine).abs() < 1e-15);
    }

    #[test]
    fn matching_cdf_on_grid_gives_zero_distance() {
        // On a grid placed where the empirical CDF and φ agree (deep in both
        // tails of a point mass at 0), the distance vanishes.
        let series = dense(&[0.0]);
        let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        assert!(dist.kolmogorov_distance(&[-8.5, 8.5]) < 1e-12);
        assert_eq!(dist.kolmogorov_distance(&[]), 0.0);
    }

    #[test]
    fn il_delta_zero_at_zero() {
        let series = dense(&[0.4, -1.0, 2.2]);
        let d = il_delta(&series, 0.0, std_normal_charfn).unwrap();
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn il_delta_vanishes_on_matching_phases() {
        // G_k all equal with e^{itG} = L(t): pick t·G = 0 mod 2π with L ≡ that phase.
        let series = dense(&[1.0, 1.0, 1.0, 1.0]);
        let t = 1.3;
        let d = il_delta(&series, t, |t| Complex64::new(0.0, t).exp()).unwrap();
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn il_delta_triangle_bound() {
        let series = dense(&[0.3, -0.2, 1.7, 0.9, -2.4]);
        let n = series.max_checkpoint() as f64;
        let harmonic: f64 = (1..=5).map(|k| 1.0 / k as f64).sum();
        for t in [-3.0, -0.5, 0.0, 0.7, 2.0, 11.0] {
            let d = il_delta(&series, t, std_normal_charfn).unwrap();
            assert!(d.norm() <= 2.0 * harmonic / n.ln() + 1e-12);
        }
    }

    #[test]
    fn lemma31_hand_case() {
        let pair = PerturbationPair::new(vec![0.0], vec![1.0]).unwrap();
        let check = lemma31_check(&pair, 0.0, 0.1, Normalizer::Harmonic).unwrap();
        assert!((check.lhs - 0.5).abs() < 1e-12);
        assert!((check.u - 0.5).abs() < 1e-12);
        assert!((check.v - 0.5).abs() < 1e-12);
        assert_eq!(check.tail_term, 0.0);
        assert!((check.rhs - 0.6).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn lemma31_rejects_nonpositive_denominators() {
        let pair = PerturbationPair::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            lemma31_check(&pair, 0.0, 0.1, Normalizer::Harmonic),
            Err(AscltError::NonPositiveDenominator(_, 1))
        ));
    }

    #[test]
    fn lemma32_hand_case() {
        let pair = PerturbationPair::new(vec![0.0], vec![0.0]).unwrap();
        let check = lemma32_check(&pair, 0.0, 0.1, Normalizer::Harmonic).unwrap();
        assert!((check.lhs - 0.5).abs() < 1e-12);
        let t_expected = (1.0 - std_normal_cdf(0.1)).abs();
        assert!((check.t - t_expected).abs() < 1e-12);
        assert_eq!(check.tail_term, 0.0);
        let rhs_expected = t_expected + 0.1 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((check.rhs - rhs_expected).abs() < 1e-12);
        assert!(check.holds);
    }

    fn random_pair(rng: &mut StdRng, positive_r: bool) -> (PerturbationPair, f64, f64) {
        let len = rng.random_range(1..60usize);
        let g: Vec<f64> = (0..len).map(|_| rng.random_range(-4.0..4.0)).collect();
        let r: Vec<f64> = (0..len)
            .map(|_| {
                if positive_r {
                    rng.random_range(0.01..3.0)
                } else {
                    rng.random_range(-2.0..2.0)
                }
            })
            .collect();
        let z = rng.random_range(-4.0..4.0);
        let e = rng.random_range(0.001..2.0);
        (PerturbationPair::new(g, r).unwrap(), z, e)
    }

    #[test]
    fn lemma31_randomized_including_large_eps() {
        let mut rng = StdRng::seed_from_u64(2024);
        for trial in 0..2000 {
            let (pair, z, eps) = random_pair(&mut rng, true);
            for normalizer in [Normalizer::Harmonic, Normalizer::LogN] {
                if pair.g.len() < 2 && normalizer == Normalizer::LogN {
                    continue;
                }
                let check = lemma31_check(&pair, z, eps, normalizer).unwrap();
                assert!(check.holds, "violation at trial {trial}: {check:?}");
                // ε ≥ 1 stays comfortably true
                let check = lemma31_check(&pair, z, eps + 1.0, normalizer).unwrap();
                assert!(check.holds);
            }
        }
    }

    #[test]
    fn lemma31_unit_denominators_have_zero_tail() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..200 {
            let len = rng.random_range(1..40usize);
            let g: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..3.0)).collect();
            let pair = PerturbationPair::new(g, vec![1.0; len]).unwrap();
            let z = rng.random_range(-3.0..3.0);
            let eps = rng.random_range(0.01..1.5);
            let check = lemma31_check(&pair, z, eps, Normalizer::Harmonic).unwrap();
            assert_eq!(check.tail_term, 0.0);
            assert!(check.holds);
        }
    }

    #[test]
    fn lemma32_randomized() {
        let mut rng = StdRng::seed_from_u64(4096);
        for trial in 0..2000 {
            let (pair, z, eta) = random_pair(&mut rng, false);
            for normalizer in [Normalizer::Harmonic, Normalizer::LogN] {
                if pair.g.len() < 2 && normalizer == Normalizer::LogN {
                    continue;
                }
                let check = lemma32_check(&pair, z, eta, normalizer).unwrap();
                assert!(check.holds, "violation at trial {trial}: {check:?}");
            }
        }
    }

    #[test]
    fn lemma32_zero_perturbation_and_huge_eta() {
        let pair = PerturbationPair::new(vec![0.3, -0.4, 1.1], vec![0.0, 0.0, 0.0]).unwrap();
        let check = lemma32_check(&pair, 0.5, 0.2, Normalizer::Harmonic).unwrap();
        assert_eq!(check.tail_term, 0.0);
        assert!(check.holds);

        let pair = PerturbationPair::new(vec![0.3, -0.4], vec![0.9, -0.7]).unwrap();
        let check = lemma32_check(&pair, 0.5, 10.0, Normalizer::Harmonic).unwrap();
        assert_eq!(check.tail_term, 0.0);
        assert!(check.holds);
    }

    #[test]
    fn harmonic_and_log_modes_agree_asymptotically() {
        // i.i.d. standard normal checkpoints: the two normalizations differ
        // by (Σ1/k)/log n → 1. Checkpoints start at k = 2, the smallest
        // index the estimator pipeline ever records.
        let n = 10_000usize;
        let mut rng = StdRng::seed_from_u64(5150);
        let entries: Vec<(usize, f64)> = (2..=n)
            .map(|k| {
                let u: f64 = rng.random_range(1e-12..1.0);
                let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                (k, (-2.0 * u.ln()).sqrt() * v.cos())
            })
            .collect();
        let series = CheckpointSeries::new(entries).unwrap();
        let harm = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
        let logn = LogAveragedDistribution::new(&series, Normalizer::LogN).unwrap();
        for z in [-1.0, 0.0, 1.0] {
            let gap = (harm.cdf(z) - logn.cdf(z)).abs();
            assert!(gap < 0.05, "gap at z = {z}: {gap}");
        }
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_and_proper(
            values in proptest::collection::vec(-10.0f64..10.0, 1..50),
            z1 in -12.0f64..12.0,
            z2 in -12.0f64..12.0,
        ) {
            let series = CheckpointSeries::dense(&values).unwrap();
            let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
            let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(dist.cdf(lo) <= dist.cdf(hi));
            prop_assert!(dist.cdf(-11.0) == 0.0);
            prop_assert!(dist.cdf(11.0) == 1.0);
            prop_assert!((0.0..=1.0).contains(&dist.cdf(z1)));
        }

        #[test]
        fn cdf_right_continuous_at_data_points(
            values in proptest::collection::vec(-5.0f64..5.0, 1..30),
        ) {
            let series = CheckpointSeries::dense(&values).unwrap();
            let dist = LogAveragedDistribution::new(&series, Normalizer::Harmonic).unwrap();
            for &v in &values {
                prop_assert!(dist.cdf(v) >= dist.cdf_left(v));
                let just_above = v + 1e-9;
                prop_assert!((dist.cdf(just_above) - dist.cdf(v)).abs() < 1e-12
                    || dist.cdf(just_above) >= dist.cdf(v));
            }
        }
    }
}
