//! Command-line driver: simulate fractional Ornstein-Uhlenbeck paths,
//! estimate the drift, evaluate normalizing constants, and run the three
//! reproducible studies (consistency, clt, asclt).
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numeric
//! failures, 1 on i/o errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fousim::constants::{QuadratureConfig, SigmaMode};
use fousim::fbm::Hurst;
use fousim::fou::{make_design, simulate_fou_raw, RefinementFactor};
use fousim::harness::{
    analyze_records, build_checkpoints, constants_json, estimate_records_csv, fmt_f64,
    parse_estimate_records_csv, parse_path_csv, path_csv, run_asclt, run_clt, run_consistency,
    CheckpointSpec, ExperimentConfig, HarnessError, ZGrid,
};
use fousim::numerics::SeededStream;
use fousim::Normalizer;

#[derive(Parser)]
#[command(name = "fousim", version, about = "fractional Ornstein-Uhlenbeck simulation and estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Drift parameter θ
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Hurst index H
    #[arg(long, default_value_t = 0.6)]
    hurst: f64,
    /// Step exponent: Δ_n = n^{-α}
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    /// Number of observations
    #[arg(long, default_value_t = 16384)]
    n: usize,
    /// Number of replications
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Base seed; replication r uses stream (seed, r)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Euler sub-steps per observation step
    #[arg(long, default_value_t = 8)]
    refine: usize,
    /// σ evaluation mode
    #[arg(long, value_parser = parse_sigma_mode, default_value = "asymptotic")]
    sigma_mode: SigmaMode,
    /// Log-average normalizer
    #[arg(long, value_parser = parse_normalizer, default_value = "harmonic")]
    normalizer: Normalizer,
    /// Checkpoint schedule: "ratio:X" for ⌊k·X^j⌋ steps, a target count,
    /// or "dense"
    #[arg(long, default_value = "ratio:1.05")]
    checkpoints: String,
    /// Relative tolerance of the chaos-variance quadrature
    #[arg(long, default_value_t = 1e-3)]
    quad_tol: f64,
    /// Budget of quadrature rule applications
    #[arg(long, default_value_t = 20_000)]
    quad_budget: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Key=value file; entries override the flags above
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonOpts {
    fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.quad_tol,
            max_rule_evals: self.quad_budget,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write it as CSV (i, t, x)
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        /// Stream id of the driving noise
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Estimate the drift along checkpoints from a path CSV
    Estimate {
        #[command(flatten)]
        common: CommonOpts,
        /// Path CSV produced by `simulate`
        #[arg(long)]
        path: PathBuf,
    },
    /// Print λ, A and σ (both modes) for (θ, H, t) as JSON
    Constants {
        #[command(flatten)]
        common: CommonOpts,
        /// Horizon t
        #[arg(long, default_value_t = 100.0)]
        t: f64,
    },
    /// Median absolute estimation error over a quadrupling design ladder
    Consistency {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Distribution of the terminal normalized error across replications
    Clt {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Per-seed log-averaged CDFs of the normalized error; or analyze an
    /// existing estimate-record CSV
    Asclt {
        #[command(flatten)]
        common: CommonOpts,
        /// Analyze this estimate CSV instead of running the experiment
        #[arg(long)]
        from_records: Option<PathBuf>,
    },
}

fn parse_sigma_mode(s: &str) -> Result<SigmaMode, String> {
    match s {
        "asymptotic" => Ok(SigmaMode::Asymptotic),
        "quadrature" => Ok(SigmaMode::Quadrature),
        other => Err(format!("expected 'asymptotic' or 'quadrature', got '{other}'")),
    }
}

fn parse_normalizer(s: &str) -> Result<Normalizer, String> {
    match s {
        "harmonic" => Ok(Normalizer::Harmonic),
        "log" => Ok(Normalizer::LogN),
        other => Err(format!("expected 'harmonic' or 'log', got '{other}'")),
    }
}

fn parse_checkpoints(s: &str) -> Result<CheckpointSpec, HarnessError> {
    if s == "dense" {
        return Ok(CheckpointSpec::Dense);
    }
    if let Some(ratio) = s.strip_prefix("ratio:") {
        let ratio: f64 = ratio
            .parse()
            .map_err(|e| HarnessError::Config(format!("bad checkpoint ratio '{ratio}': {e}")))?;
        return Ok(CheckpointSpec::Geometric { ratio });
    }
    let count: usize = s
        .parse()
        .map_err(|e| HarnessError::Config(format!("bad checkpoint spec '{s}': {e}")))?;
    Ok(CheckpointSpec::GeometricCount { count })
}

/// Apply `key=value` lines from the config file on top of the parsed flags.
fn apply_config_file(common: &mut CommonOpts) -> Result<(), HarnessError> {
    let Some(path) = common.config.clone() else {
        return Ok(());
    };
    let contents = fs::read_to_string(&path)?;
    for (ln, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!(
                "{}:{}: expected key=value, got '{raw}'",
                path.display(),
                ln + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| HarnessError::Config(format!("{}:{}: {e}", path.display(), ln + 1));
        match key {
            "theta" => common.theta = value.parse().map_err(|e| bad(format!("theta: {e}")))?,
            "hurst" => common.hurst = value.parse().map_err(|e| bad(format!("hurst: {e}")))?,
            "alpha" => common.alpha = value.parse().map_err(|e| bad(format!("alpha: {e}")))?,
            "n" => common.n = value.parse().map_err(|e| bad(format!("n: {e}")))?,
            "reps" => common.reps = value.parse().map_err(|e| bad(format!("reps: {e}")))?,
            "seed" => common.seed = value.parse().map_err(|e| bad(format!("seed: {e}")))?,
            "refine" => common.refine = value.parse().map_err(|e| bad(format!("refine: {e}")))?,
            "sigma-mode" | "sigma_mode" => {
                common.sigma_mode = parse_sigma_mode(value).map_err(bad)?
            }
            "normalizer" => common.normalizer = parse_normalizer(value).map_err(bad)?,
            "checkpoints" => common.checkpoints = value.to_string(),
            "quad-tol" | "quad_tol" => {
                common.quad_tol = value.parse().map_err(|e| bad(format!("quad-tol: {e}")))?
            }
            "quad-budget" | "quad_budget" => {
                common.quad_budget = value.parse().map_err(|e| bad(format!("quad-budget: {e}")))?
            }
            "out" => common.out = PathBuf::from(value),
            other => {
                return Err(HarnessError::Config(format!(
                    "{}:{}: unknown key '{other}'",
                    path.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(())
}

fn experiment_config(common: &CommonOpts) -> Result<ExperimentConfig, HarnessError> {
    Ok(ExperimentConfig {
        theta: common.theta,
        hurst: common.hurst,
        alpha: common.alpha,
        n: common.n,
        replications: common.reps,
        seed: common.seed,
        refinement: common.refine,
        checkpoints: parse_checkpoints(&common.checkpoints)?,
        sigma_mode: common.sigma_mode,
        normalizer: common.normalizer,
        z_grid: ZGrid::default(),
        quadrature: common.quadrature(),
    })
}

fn hurst_of(common: &CommonOpts) -> Result<Hurst, HarnessError> {
    Hurst::new(common.hurst).map_err(|e| HarnessError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate { mut common, stream } => {
            apply_config_file(&mut common)?;
            let hurst = hurst_of(&common)?;
            let design = make_design(common.n, common.alpha, hurst)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let refinement = RefinementFactor::new(common.refine)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let path = simulate_fou_raw(
                common.theta,
                hurst,
                design.grid(),
                refinement,
                SeededStream::new(common.seed, stream),
            )?;
            let file = common.out.join("path.csv");
            fs::create_dir_all(&common.out)?;
            fs::write(&file, path_csv(&path))?;
            println!("wrote {}", file.display());
        }
        Command::Estimate { mut common, path } => {
            apply_config_file(&mut common)?;
            let hurst = hurst_of(&common)?;
            let observed = parse_path_csv(&fs::read_to_string(&path)?)?;
            let n = observed.values.len() - 1;
            let design = make_design(n, common.alpha, hurst)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let rel_gap = ((design.delta() - observed.grid.step()) / design.delta()).abs();
            if rel_gap > 1e-9 {
                return Err(HarnessError::Config(format!(
                    "path step {} does not match the n^(-alpha) design step {} (n = {n}, alpha = {})",
                    fmt_f64(observed.grid.step()),
                    fmt_f64(design.delta()),
                    common.alpha
                )));
            }
            let params = fousim::fou::ModelParams::new(common.theta, hurst)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let checkpoints = build_checkpoints(n, &parse_checkpoints(&common.checkpoints)?)?;
            let records = fousim::estimators::estimate_series(
                &observed,
                &design,
                params,
                common.sigma_mode,
                &common.quadrature(),
                &checkpoints,
            )
            .map_err(|e| HarnessError::Numeric(e.to_string()))?;
            let file = common.out.join("estimates.csv");
            fs::create_dir_all(&common.out)?;
            fs::write(&file, estimate_records_csv(&records))?;
            println!("wrote {}", file.display());
        }
        Command::Constants { mut common, t } => {
            apply_config_file(&mut common)?;
            let hurst = hurst_of(&common)?;
            let value = constants_json(common.theta, hurst, t, &common.quadrature())?;
            println!("{value:#}");
            if common.out.as_path() != Path::new(".") {
                fs::create_dir_all(&common.out)?;
                let file = common.out.join("constants.json");
                fs::write(&file, format!("{value:#}\n"))?;
            }
        }
        Command::Consistency { mut common } => {
            apply_config_file(&mut common)?;
            let report = run_consistency(&experiment_config(&common)?)?;
            for file in report.emit(&common.out)? {
                println!("wrote {}", file.display());
            }
            for (n, median) in &report.medians {
                println!("n = {n}: median |theta_hat - theta| = {}", fmt_f64(*median));
            }
        }
        Command::Clt { mut common } => {
            apply_config_file(&mut common)?;
            let report = run_clt(&experiment_config(&common)?)?;
            for file in report.emit(&common.out)? {
                println!("wrote {}", file.display());
            }
            println!(
                "KS vs N(0,1) = {}, mean = {}, variance = {}",
                fmt_f64(report.ks_statistic),
                fmt_f64(report.sample_mean),
                fmt_f64(report.sample_variance)
            );
        }
        Command::Asclt {
            mut common,
            from_records,
        } => {
            apply_config_file(&mut common)?;
            if let Some(records_path) = from_records {
                let records = parse_estimate_records_csv(&fs::read_to_string(&records_path)?)?;
                let (cdf_rows, kolmogorov, il) =
                    analyze_records(&records, common.normalizer, &ZGrid::default())?;
                fs::create_dir_all(&common.out)?;
                let mut csv = String::from("z,empirical,gaussian,abs_gap\n");
                for r in &cdf_rows {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_f64(r.z),
                        fmt_f64(r.empirical),
                        fmt_f64(r.gaussian),
                        fmt_f64(r.abs_gap)
                    ));
                }
                let cdf_file = common.out.join("asclt_cdf.csv");
                fs::write(&cdf_file, csv)?;
                let summary = serde_json::json!({
                    "kolmogorov": kolmogorov,
                    "n_checkpoints": records.iter().filter(|r| !r.degenerate).count(),
                    "normalizer": match common.normalizer {
                        Normalizer::Harmonic => "harmonic",
                        Normalizer::LogN => "log",
                    },
                    "il_delta": il.iter().map(|row| serde_json::json!({
                        "t": row.t, "re": row.re, "im": row.im, "magnitude": row.magnitude,
                    })).collect::<Vec<_>>(),
                });
                let summary_file = common.out.join("asclt_summary.json");
                fs::write(&summary_file, format!("{summary:#}\n"))?;
                println!("{summary:#}");
                println!("wrote {}", cdf_file.display());
                println!("wrote {}", summary_file.display());
            } else {
                let report = run_asclt(&experiment_config(&common)?)?;
                for file in report.emit(&common.out)? {
                    println!("wrote {}", file.display());
                }
                println!(
                    "median Kolmogorov distance = {}",
                    fmt_f64(report.median_kolmogorov)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                HarnessError::Config(_) => ExitCode::from(2),
                HarnessError::Numeric(_) => ExitCode::from(3),
                HarnessError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
