//! Simulation and least-squares drift estimation for Ornstein-Uhlenbeck
//! processes driven by fractional Brownian motion, together with the
//! log-averaged empirical-distribution machinery used to probe almost sure
//! central limit behaviour of the estimator error.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`numerics`] — seeded normal streams and the special functions Γ, φ.
//! * [`fbm`] — exact fractional Brownian motion sampling (Cholesky and
//!   circulant embedding) and its covariance structure.
//! * [`fou`] — Euler simulation of `dX = -θ X dt + dB` on power-law
//!   observation designs `Δ_n = n^{-α}`.
//! * [`constants`] — the normalizing constants λ(θ,H), A(θ,H) and the
//!   chaos variance `E(F_t²)` by adaptive quadrature.
//! * [`estimators`] — the discrete least-squares drift estimator and its
//!   normalized error statistics at checkpoints.
//! * [`asclt`] — log-averaged empirical CDFs, the empirical
//!   Ibragimov-Lifshits statistic, and deterministic inequality checkers
//!   for the ratio/sum perturbation lemmas.
//! * [`harness`] — reproducible experiment drivers (consistency, CLT,
//!   ASCLT) with CSV/JSON emission.

pub mod asclt;
pub mod constants;
pub mod estimators;
pub mod fbm;
pub mod fou;
pub mod harness;
pub mod numerics;
pub mod stats;

pub use asclt::{CheckpointSeries, LogAveragedDistribution, Normalizer, PerturbationPair};
pub use constants::{KernelSpec, QuadratureConfig, SigmaMode};
pub use estimators::EstimateRecord;
pub use fbm::{Hurst, Path, TimeGrid};
pub use fou::{ModelParams, RefinementFactor, SamplingDesign};
pub use harness::{CheckpointSpec, ExperimentConfig, ZGrid};
pub use numerics::SeededStream;
