//! Reproducible experiment drivers for the three studies: strong
//! consistency of the drift estimator, normality of the terminal normalized
//! error, and the pathwise log-averaged distribution of the error along
//! checkpoints.
//!
//! Everything emitted is a pure function of the configuration: replication
//! r draws from `(seed, stream_id = r)` (ladder runs offset the id per
//! rung), replications may run concurrently, and rows are sorted by
//! replication index before emission. CSV floats are printed with 17
//! significant digits so files round-trip and re-runs are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::asclt::{il_delta, std_normal_charfn, AscltError, CheckpointSeries,
    LogAveragedDistribution, Normalizer};
use crate::constants::{
    big_a_const, ef2, lambda_const, sigma, ConstantsError, KernelSpec, QuadratureConfig, SigmaMode,
};
use crate::estimators::{discrete_lse, estimate_series, EstimateRecord, EstimatorError};
use crate::fbm::{FbmError, FgnSampler, Hurst};
use crate::fou::{make_design, simulate_fou_with_sampler, FouError, RefinementFactor};
use crate::numerics::{std_normal_cdf, SeededStream};
use crate::stats::{ks_statistic_std_normal, mean, median, variance};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl From<FouError> for HarnessError {
    fn from(e: FouError) -> Self {
        HarnessError::Numeric(e.to_string())
    }
}
impl From<FbmError> for HarnessError {
    fn from(e: FbmError) -> Self {
        HarnessError::Numeric(e.to_string())
    }
}
impl From<ConstantsError> for HarnessError {
    fn from(e: ConstantsError) -> Self {
        HarnessError::Numeric(e.to_string())
    }
}
impl From<EstimatorError> for HarnessError {
    fn from(e: EstimatorError) -> Self {
        HarnessError::Numeric(e.to_string())
    }
}
impl From<AscltError> for HarnessError {
    fn from(e: AscltError) -> Self {
        HarnessError::Numeric(e.to_string())
    }
}

/// Checkpoint schedule specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckpointSpec {
    /// `⌊k_min · ratio^j⌋` with duplicates removed, ending at n.
    Geometric { ratio: f64 },
    /// Geometric schedule with the ratio derived to hit about `count`
    /// checkpoints between 2 and n.
    GeometricCount { count: usize },
    /// Every k from 1 to n (k = 1 is always flagged degenerate).
    Dense,
}

impl CheckpointSpec {
    pub fn geometric_default() -> Self {
        CheckpointSpec::Geometric { ratio: 1.05 }
    }
}

/// Build the checkpoint indices for a design of size `n`.
pub fn build_checkpoints(n: usize, spec: &CheckpointSpec) -> Result<Vec<usize>, HarnessError> {
    match spec {
        CheckpointSpec::Dense => Ok((1..=n).collect()),
        CheckpointSpec::Geometric { ratio } => {
            if !(*ratio > 1.0) {
                return Err(HarnessError::Config(format!(
                    "checkpoint ratio must exceed 1, got {ratio}"
                )));
            }
            if n < 2 {
                return Err(HarnessError::Config(
                    "geometric checkpoints need n ≥ 2".into(),
                ));
            }
            let mut ks = Vec::new();
            let mut x = 2.0f64;
            loop {
                let k = x.floor() as usize;
                if k > n {
                    break;
                }
                if ks.last() != Some(&k) {
                    ks.push(k);
                }
                x *= ratio;
                // floors repeat until the geometric step exceeds one
                if (x.floor() as usize) <= *ks.last().unwrap() {
                    x = (*ks.last().unwrap() + 1) as f64;
                }
            }
            if ks.last() != Some(&n) {
                ks.push(n);
            }
            Ok(ks)
        }
        CheckpointSpec::GeometricCount { count } => {
            if *count < 2 {
                return Err(HarnessError::Config(
                    "geometric checkpoint count must be at least 2".into(),
                ));
            }
            // The floor/dedupe keeps every integer up to ~1/(ratio-1), so
            // deriving the ratio from the target count alone undershoots.
            // A few fixed-point rounds account for the dense head.
            let nf = n as f64;
            let mut ratio = (nf / 2.0).powf(1.0 / (*count as f64 - 1.0));
            for _ in 0..30 {
                let dense_head = (1.0 / (ratio - 1.0)).clamp(2.0, nf);
                let tail_count = (*count as f64 - (dense_head - 1.0)).max(2.0);
                ratio = (nf / dense_head)
                    .powf(1.0 / tail_count)
                    .max(1.0 + 1e-9);
            }
            build_checkpoints(n, &CheckpointSpec::Geometric { ratio })
        }
    }
}

/// Evaluation grid for empirical-vs-gaussian CDF rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for ZGrid {
    fn default() -> Self {
        Self {
            min: -4.0,
            max: 4.0,
            step: 0.01,
        }
    }
}

impl ZGrid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step).round() as usize;
        (0..=count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// Full experiment configuration; every emitted number is a function of it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub theta: f64,
    pub hurst: f64,
    pub alpha: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub refinement: usize,
    pub checkpoints: CheckpointSpec,
    pub sigma_mode: SigmaMode,
    pub normalizer: Normalizer,
    pub z_grid: ZGrid,
    pub quadrature: QuadratureConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            hurst: 0.6,
            alpha: 0.6,
            n: 1 << 14,
            replications: 20,
            seed: 42,
            refinement: 8,
            checkpoints: CheckpointSpec::geometric_default(),
            sigma_mode: SigmaMode::Asymptotic,
            normalizer: Normalizer::Harmonic,
            z_grid: ZGrid::default(),
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn validate_common(&self) -> Result<(Hurst, RefinementFactor), HarnessError> {
        if self.replications == 0 {
            return Err(HarnessError::Config("replications must be ≥ 1".into()));
        }
        if !(self.theta > 0.0) {
            return Err(HarnessError::Config(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HarnessError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        let hurst = Hurst::new(self.hurst)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if !hurst.is_long_memory() {
            return Err(HarnessError::Config(format!(
                "model requires H in (1/2, 1), got {}",
                self.hurst
            )));
        }
        let refinement = RefinementFactor::new(self.refinement)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok((hurst, refinement))
    }

    fn require_clt_band(&self) -> Result<(), HarnessError> {
        if self.hurst >= 0.75 {
            return Err(HarnessError::Config(format!(
                "normalized-error experiments require H in (1/2, 3/4), got {}",
                self.hurst
            )));
        }
        Ok(())
    }

    fn require_asclt_alpha(&self, hurst: Hurst) -> Result<(), HarnessError> {
        let lower = 1.0 / (2.0 * hurst.value() + 1.0);
        if !(self.alpha > lower && self.alpha < 1.0) {
            return Err(HarnessError::Config(format!(
                "the observation design requires alpha in (1/(2H+1), 1) = ({lower:.4}, 1) \
                 for the log-averaged limit theorem; got alpha = {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Configuration echo embedded in every JSON report.
    pub fn provenance(&self) -> serde_json::Value {
        json!({
            "theta": self.theta,
            "hurst": self.hurst,
            "alpha": self.alpha,
            "n": self.n,
            "replications": self.replications,
            "seed": self.seed,
            "refinement": self.refinement,
            "checkpoints": match self.checkpoints {
                CheckpointSpec::Geometric { ratio } => format!("geometric:{ratio}"),
                CheckpointSpec::GeometricCount { count } => format!("geometric-count:{count}"),
                CheckpointSpec::Dense => "dense".to_string(),
            },
            "sigma_mode": match self.sigma_mode {
                SigmaMode::Asymptotic => "asymptotic",
                SigmaMode::Quadrature => "quadrature",
            },
            "normalizer": match self.normalizer {
                Normalizer::Harmonic => "harmonic",
                Normalizer::LogN => "log",
            },
            "z_grid": { "min": self.z_grid.min, "max": self.z_grid.max, "step": self.z_grid.step },
            "quadrature": { "rel_tol": self.quadrature.rel_tol,
                            "max_rule_evals": self.quadrature.max_rule_evals },
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

const LADDER_STRIDE: u64 = 1 << 32;

// ---------------------------------------------------------------------------
// Consistency study
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub n: usize,
    pub replication: u64,
    pub theta_hat: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub config: ExperimentConfig,
    pub ladder: Vec<usize>,
    pub rows: Vec<ConsistencyRow>,
    /// Median |θ~ - θ| per ladder rung, NaN rows excluded.
    pub medians: Vec<(usize, f64)>,
}

/// Estimate θ on a quadrupling ladder `n/16, n/4, n` of design sizes and
/// report per-replication absolute errors with their medians.
pub fn run_consistency(config: &ExperimentConfig) -> Result<ConsistencyReport, HarnessError> {
    let (hurst, refinement) = config.validate_common()?;
    let mut ladder: Vec<usize> = [config.n / 16, config.n / 4, config.n]
        .into_iter()
        .map(|n| n.max(2))
        .collect();
    ladder.dedup();

    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for (rung, &n) in ladder.iter().enumerate() {
        let design = make_design(n, config.alpha, hurst)?;
        let grid = design.grid();
        let m = refinement.get();
        let sampler = FgnSampler::new(n * m, hurst, design.delta() / m as f64)?;
        let rung_rows: Vec<ConsistencyRow> = (0..config.replications as u64)
            .into_par_iter()
            .map(|rep| {
                let stream = SeededStream::new(config.seed, rung as u64 * LADDER_STRIDE + rep);
                let path =
                    simulate_fou_with_sampler(config.theta, grid, refinement, &sampler, stream);
                let theta_hat = discrete_lse(&path, design.delta()).unwrap_or(f64::NAN);
                ConsistencyRow {
                    n,
                    replication: rep,
                    theta_hat,
                    abs_err: (theta_hat - config.theta).abs(),
                }
            })
            .collect();
        let errs: Vec<f64> = rung_rows
            .iter()
            .map(|r| r.abs_err)
            .filter(|e| e.is_finite())
            .collect();
        if errs.is_empty() {
            return Err(HarnessError::Numeric(format!(
                "all {} replications degenerate at n = {n}",
                config.replications
            )));
        }
        medians.push((n, median(&errs)));
        rows.extend(rung_rows);
    }
    Ok(ConsistencyReport {
        config: config.clone(),
        ladder,
        rows,
        medians,
    })
}

// ---------------------------------------------------------------------------
// Terminal CLT study
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltRow {
    pub replication: u64,
    pub norm_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltReport {
    pub config: ExperimentConfig,
    pub rows: Vec<CltRow>,
    pub ks_statistic: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

/// Cross-replication sample of the terminal normalized error
/// `√T_n/σ_{T_n} (θ - θ~_n)` and its Kolmogorov-Smirnov distance to the
/// standard normal distribution.
pub fn run_clt(config: &ExperimentConfig) -> Result<CltReport, HarnessError> {
    let (hurst, refinement) = config.validate_common()?;
    config.require_clt_band()?;
    let design = make_design(config.n, config.alpha, hurst)?;
    let grid = design.grid();
    let m = refinement.get();
    let sampler = FgnSampler::new(config.n * m, hurst, design.delta() / m as f64)?;
    let params = crate::fou::ModelParams::new(config.theta, hurst)
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let rows: Vec<CltRow> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let stream = SeededStream::new(config.seed, rep);
            let path = simulate_fou_with_sampler(config.theta, grid, refinement, &sampler, stream);
            let norm_err = estimate_series(
                &path,
                &design,
                params,
                config.sigma_mode,
                &config.quadrature,
                &[config.n],
            )
            .map(|records| records[0].norm_err)
            .unwrap_or(f64::NAN);
            CltRow {
                replication: rep,
                norm_err,
            }
        })
        .collect();

    let sample: Vec<f64> = rows
        .iter()
        .map(|r| r.norm_err)
        .filter(|e| e.is_finite())
        .collect();
    if sample.is_empty() {
        return Err(HarnessError::Numeric("all replications degenerate".into()));
    }
    Ok(CltReport {
        config: config.clone(),
        ks_statistic: ks_statistic_std_normal(&sample),
        sample_mean: mean(&sample),
        sample_variance: variance(&sample),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Pathwise log-averaged study
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfRow {
    pub z: f64,
    pub empirical: f64,
    pub gaussian: f64,
    pub abs_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlRow {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscltSeed {
    pub replication: u64,
    pub records: Vec<EstimateRecord>,
    pub cdf_rows: Vec<CdfRow>,
    pub kolmogorov: f64,
    pub il: Vec<IlRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscltReport {
    pub config: ExperimentConfig,
    pub checkpoints: Vec<usize>,
    pub seeds: Vec<AscltSeed>,
    pub median_kolmogorov: f64,
}

/// Evaluation points for the empirical characteristic-function diagnostic.
pub const IL_T_GRID: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0];

/// Analyze one replication's estimate records: log-averaged CDF rows on the
/// grid, Kolmogorov distance to φ, and the characteristic-function
/// diagnostic. Degenerate checkpoints are dropped from the series.
pub fn analyze_records(
    records: &[EstimateRecord],
    normalizer: Normalizer,
    z_grid: &ZGrid,
) -> Result<(Vec<CdfRow>, f64, Vec<IlRow>), HarnessError> {
    let entries: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| !r.degenerate && r.norm_err.is_finite())
        .map(|r| (r.k, r.norm_err))
        .collect();
    let series = CheckpointSeries::new(entries)?;
    let dist = LogAveragedDistribution::new(&series, normalizer)?;
    let points = z_grid.points();
    let cdf_rows: Vec<CdfRow> = points
        .iter()
        .map(|&z| {
            let empirical = dist.cdf(z);
            let gaussian = std_normal_cdf(z);
            CdfRow {
                z,
                empirical,
                gaussian,
                abs_gap: (empirical - gaussian).abs(),
            }
        })
        .collect();
    let kolmogorov = dist.kolmogorov_distance(&points);
    let il = IL_T_GRID
        .iter()
        .map(|&t| {
            il_delta(&series, t, std_normal_charfn).map(|d| IlRow {
                t,
                re: d.re,
                im: d.im,
                magnitude: d.norm(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((cdf_rows, kolmogorov, il))
}

/// Per-seed log-averaged CDFs of the normalized error along the checkpoint
/// schedule, with Kolmogorov distances to φ and their median across seeds.
pub fn run_asclt(config: &ExperimentConfig) -> Result<AscltReport, HarnessError> {
    let (hurst, refinement) = config.validate_common()?;
    config.require_clt_band()?;
    config.require_asclt_alpha(hurst)?;
    let design = make_design(config.n, config.alpha, hurst)?;
    let grid = design.grid();
    let m = refinement.get();
    let sampler = FgnSampler::new(config.n * m, hurst, design.delta() / m as f64)?;
    let params = crate::fou::ModelParams::new(config.theta, hurst)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let checkpoints = build_checkpoints(config.n, &config.checkpoints)?;

    let seeds: Vec<AscltSeed> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| -> Result<AscltSeed, HarnessError> {
            let stream = SeededStream::new(config.seed, rep);
            let path = simulate_fou_with_sampler(config.theta, grid, refinement, &sampler, stream);
            let records = estimate_series(
                &path,
                &design,
                params,
                config.sigma_mode,
                &config.quadrature,
                &checkpoints,
            )?;
            let (cdf_rows, kolmogorov, il) =
                analyze_records(&records, config.normalizer, &config.z_grid)?;
            Ok(AscltSeed {
                replication: rep,
                records,
                cdf_rows,
                kolmogorov,
                il,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let distances: Vec<f64> = seeds.iter().map(|s| s.kolmogorov).collect();
    Ok(AscltReport {
        config: config.clone(),
        checkpoints,
        median_kolmogorov: median(&distances),
        seeds,
    })
}

// ---------------------------------------------------------------------------
// Constants report
// ---------------------------------------------------------------------------

/// JSON record of λ, A and σ in both modes at a horizon.
pub fn constants_json(
    theta: f64,
    hurst: Hurst,
    horizon: f64,
    quad: &QuadratureConfig,
) -> Result<serde_json::Value, HarnessError> {
    let spec = KernelSpec::new(theta, hurst, horizon)?;
    let lambda = lambda_const(theta, hurst);
    let a = big_a_const(theta, hurst)?;
    let ef2_est = ef2(spec, quad)?;
    let sigma_asymptotic = sigma(spec, SigmaMode::Asymptotic, quad)?;
    let sigma_quadrature = sigma(spec, SigmaMode::Quadrature, quad)?;
    Ok(json!({
        "lambda": lambda,
        "A": a,
        "ef2": ef2_est.value,
        "ef2_error_bound": ef2_est.error_bound,
        "sigma_asymptotic": sigma_asymptotic,
        "sigma_quadrature": sigma_quadrature,
        "t": horizon,
    }))
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Full-precision float formatting for CSV: 17 significant digits, '.'
/// decimal separator, `NaN` for flagged values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_atomic(path: &FsPath, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Serialize a path as CSV with columns (i, t, x).
pub fn path_csv(path: &crate::fbm::Path) -> String {
    let mut out = String::from("i,t,x\n");
    for (i, &x) in path.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_f64(path.grid.time(i)), fmt_f64(x));
    }
    out
}

/// Parse a path CSV produced by [`path_csv`].
pub fn parse_path_csv(contents: &str) -> Result<crate::fbm::Path, HarnessError> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (ln, line) in contents.lines().enumerate() {
        if ln == 0 {
            if line.trim() != "i,t,x" {
                return Err(HarnessError::Config(format!(
                    "unexpected path CSV header: {line}"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(HarnessError::Config(format!(
                "malformed path CSV line {}: {line}",
                ln + 1
            )));
        }
        let t: f64 = fields[1]
            .parse()
            .map_err(|e| HarnessError::Config(format!("bad time on line {}: {e}", ln + 1)))?;
        let x: f64 = fields[2]
            .parse()
            .map_err(|e| HarnessError::Config(format!("bad value on line {}: {e}", ln + 1)))?;
        times.push(t);
        values.push(x);
    }
    if values.len() < 2 {
        return Err(HarnessError::Config(
            "path CSV must contain at least two rows".into(),
        ));
    }
    let step = times[1] - times[0];
    let grid = crate::fbm::TimeGrid::new(values.len() - 1, step)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(crate::fbm::Path { grid, values })
}

/// Serialize estimate records as CSV with columns
/// (k, T_k, theta_hat, G_bar, R_bar, norm_err).
pub fn estimate_records_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from("k,T_k,theta_hat,G_bar,R_bar,norm_err\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k,
            fmt_f64(r.t_k),
            fmt_f64(r.theta_hat),
            fmt_f64(r.g_bar),
            fmt_f64(r.r_bar),
            fmt_f64(r.norm_err)
        );
    }
    out
}

/// Parse an estimate-record CSV back into records (degenerate rows are the
/// ones whose statistics fail to parse as finite numbers).
pub fn parse_estimate_records_csv(contents: &str) -> Result<Vec<EstimateRecord>, HarnessError> {
    let mut records = Vec::new();
    for (ln, line) in contents.lines().enumerate() {
        if ln == 0 {
            if line.trim() != "k,T_k,theta_hat,G_bar,R_bar,norm_err" {
                return Err(HarnessError::Config(format!(
                    "unexpected estimate CSV header: {line}"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::Config(format!(
                "malformed estimate CSV line {}: {line}",
                ln + 1
            )));
        }
        let k: usize = fields[0]
            .parse()
            .map_err(|e| HarnessError::Config(format!("bad k on line {}: {e}", ln + 1)))?;
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().unwrap_or(f64::NAN))
            .collect();
        let degenerate = nums.iter().any(|v| !v.is_finite());
        records.push(EstimateRecord {
            k,
            t_k: nums[0],
            theta_hat: nums[1],
            g_bar: nums[2],
            r_bar: nums[3],
            norm_err: nums[4],
            degenerate,
        });
    }
    if records.is_empty() {
        return Err(HarnessError::Config("estimate CSV contains no rows".into()));
    }
    Ok(records)
}

fn cdf_rows_csv(rows: &[CdfRow]) -> String {
    let mut out = String::from("z,empirical,gaussian,abs_gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(r.z),
            fmt_f64(r.empirical),
            fmt_f64(r.gaussian),
            fmt_f64(r.abs_gap)
        );
    }
    out
}

impl ConsistencyReport {
    pub fn emit(&self, dir: &FsPath) -> Result<Vec<PathBuf>, HarnessError> {
        let mut csv = String::from("n,seed,theta_hat,abs_err\n");
        for r in &self.rows {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                r.n,
                r.replication,
                fmt_f64(r.theta_hat),
                fmt_f64(r.abs_err)
            );
        }
        let csv_path = dir.join("consistency.csv");
        write_atomic(&csv_path, &csv)?;

        let summary = json!({
            "experiment": "consistency",
            "config": self.config.provenance(),
            "ladder": self.ladder,
            "medians": self.medians.iter()
                .map(|(n, m)| json!({ "n": n, "median_abs_err": m }))
                .collect::<Vec<_>>(),
        });
        let json_path = dir.join("consistency_summary.json");
        write_atomic(&json_path, &format!("{:#}\n", summary))?;
        Ok(vec![csv_path, json_path])
    }
}

impl CltReport {
    pub fn emit(&self, dir: &FsPath) -> Result<Vec<PathBuf>, HarnessError> {
        let mut csv = String::from("seed,norm_err\n");
        for r in &self.rows {
            let _ = writeln!(csv, "{},{}", r.replication, fmt_f64(r.norm_err));
        }
        let csv_path = dir.join("clt.csv");
        write_atomic(&csv_path, &csv)?;

        let summary = json!({
            "experiment": "clt",
            "config": self.config.provenance(),
            "ks_statistic": self.ks_statistic,
            "sample_mean": self.sample_mean,
            "sample_variance": self.sample_variance,
        });
        let json_path = dir.join("clt_summary.json");
        write_atomic(&json_path, &format!("{:#}\n", summary))?;
        Ok(vec![csv_path, json_path])
    }
}

impl AscltReport {
    pub fn emit(&self, dir: &FsPath) -> Result<Vec<PathBuf>, HarnessError> {
        let mut written = Vec::new();
        let mut csv = String::from("seed,k,T_k,theta_hat,norm_err\n");
        for seed in &self.seeds {
            for r in &seed.records {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    seed.replication,
                    r.k,
                    fmt_f64(r.t_k),
                    fmt_f64(r.theta_hat),
                    fmt_f64(r.norm_err)
                );
            }
        }
        let records_path = dir.join("asclt_records.csv");
        write_atomic(&records_path, &csv)?;
        written.push(records_path);

        for seed in &self.seeds {
            let path = dir.join(format!("asclt_cdf_seed{}.csv", seed.replication));
            write_atomic(&path, &cdf_rows_csv(&seed.cdf_rows))?;
            written.push(path);
        }

        let summary = json!({
            "experiment": "asclt",
            "config": self.config.provenance(),
            "n_checkpoints": self.checkpoints.len(),
            "normalizer": match self.config.normalizer {
                Normalizer::Harmonic => "harmonic",
                Normalizer::LogN => "log",
            },
            "median_kolmogorov": self.median_kolmogorov,
            "seeds": self.seeds.iter().map(|s| json!({
                "seed": s.replication,
                "kolmogorov": s.kolmogorov,
                "il_delta": s.il.iter().map(|row| json!({
                    "t": row.t, "re": row.re, "im": row.im, "magnitude": row.magnitude,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        let json_path = dir.join("asclt_summary.json");
        write_atomic(&json_path, &format!("{:#}\n", summary))?;
        written.push(json_path);
        Ok(written)
    }
}
