//! Normalizing constants for the drift estimator's error statistics.
//!
//! Three quantities are computed here for drift θ and Hurst index H:
//!
//! * `λ(θ, H) = θ^{-2H} H Γ(2H)` — the ergodic limit of the time-averaged
//!   squared process, `(1/t)∫₀ᵗ X_s² ds`.
//! * `A(θ, H)` — the large-horizon limit of the chaos variance `E(F_t²)`,
//!   where `F_t` is the normalized double Wiener integral driving the
//!   estimator's fluctuations. It has a Γ(3-4H) pole at H = 3/4.
//! * `E(F_t²)` at a finite horizon, by deterministic quadrature of
//!
//!   ```text
//!   H²(2H-1)²/(2t) ∬∬_{[0,t]⁴} e^{-θ|u-v|} e^{-θ|x-y|}
//!                              |u-x|^{2H-2} |v-y|^{2H-2} du dv dx dy.
//!   ```
//!
//! The 4D integral is never attacked directly. Substituting the difference
//! variables `a = u-x`, `b = v-y` and integrating the translation direction
//! analytically collapses it to a 2D integral of a closed-form weight
//! `Ψ_t(a, b)` against the singular kernel `|a|^{2H-2}|b|^{2H-2}`; the
//! substitution `a = s^{1/(2H-1)}` then absorbs the endpoint singularity
//! exactly, leaving a bounded integrand for adaptive Gauss-Kronrod panels.
//!
//! The normalized error statistic `√t/σ_t (θ - θ~)` is standardized by
//! `σ_t = √(E(F_t²)) / λ(θ, H)`; at H = 1/2 the asymptotic value reduces to
//! the classical `√(2θ)` of the Ornstein-Uhlenbeck drift estimator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::fbm::Hurst;
use crate::numerics::gamma_fn;

#[derive(Debug, Error, PartialEq)]
pub enum ConstantsError {
    #[error("drift parameter must be positive, got {0}")]
    NonPositiveTheta(f64),
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
    #[error("asymptotic variance requires H in [1/2, 3/4), got {0} below 1/2")]
    HurstBelowHalf(f64),
    #[error("asymptotic variance has a pole at H = 3/4; got {0}")]
    HurstAtPole(f64),
    #[error("chaos variance quadrature requires H strictly inside (1/2, 3/4), got {0}")]
    HurstOutsideQuadratureDomain(f64),
    #[error(
        "quadrature did not reach relative tolerance {rel_tol:.1e} within budget: \
         value {value:.6e}, error bound {error_bound:.1e}"
    )]
    ToleranceNotMet {
        rel_tol: f64,
        value: f64,
        error_bound: f64,
    },
}

/// `λ(θ, H) = θ^{-2H} H Γ(2H)`, the stationary second moment.
pub fn lambda_const(theta: f64, hurst: Hurst) -> f64 {
    debug_assert!(theta > 0.0);
    let h = hurst.value();
    theta.powf(-2.0 * h) * h * gamma_fn(2.0 * h).expect("2H > 0")
}

/// `A(θ, H) = θ^{1-4H} H²(4H-1) [Γ(2H)² + Γ(2H)Γ(3-4H)Γ(4H-1)/Γ(2-2H)]`.
///
/// Defined for H in [1/2, 3/4); the H = 1/2 boundary is kept because every
/// factor is finite there and the value 1/(2θ) is the classical
/// cross-check.
pub fn big_a_const(theta: f64, hurst: Hurst) -> Result<f64, ConstantsError> {
    if !(theta > 0.0) {
        return Err(ConstantsError::NonPositiveTheta(theta));
    }
    let h = hurst.value();
    if h < 0.5 {
        return Err(ConstantsError::HurstBelowHalf(h));
    }
    if h >= 0.75 {
        return Err(ConstantsError::HurstAtPole(h));
    }
    let g = |x: f64| gamma_fn(x).expect("argument positive on the domain");
    let bracket = g(2.0 * h).powi(2)
        + g(2.0 * h) * g(3.0 - 4.0 * h) * g(4.0 * h - 1.0) / g(2.0 - 2.0 * h);
    Ok(theta.powf(1.0 - 4.0 * h) * h * h * (4.0 * h - 1.0) * bracket)
}

/// Inputs of the finite-horizon chaos variance: the kernel
/// `e^{-θ|u-v|}/(2√t)` on `[0, t]²` with the H-dependent inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    theta: f64,
    hurst: Hurst,
    horizon: f64,
}

impl KernelSpec {
    /// Requires θ > 0, t > 0 and H strictly inside (1/2, 3/4): the kernel
    /// representation of the inner product needs H > 1/2 (the prefactor
    /// (2H-1)² vanishes while the kernel blows up at the boundary), and the
    /// asymptotic comparison constant has a pole at 3/4.
    pub fn new(theta: f64, hurst: Hurst, horizon: f64) -> Result<Self, ConstantsError> {
        if !(theta > 0.0) {
            return Err(ConstantsError::NonPositiveTheta(theta));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(ConstantsError::NonPositiveHorizon(horizon));
        }
        let h = hurst.value();
        if h <= 0.5 || h >= 0.75 {
            return Err(ConstantsError::HurstOutsideQuadratureDomain(h));
        }
        Ok(Self {
            theta,
            hurst,
            horizon,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// How σ_t is evaluated at a finite horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    /// Use the large-horizon limit A(θ, H) in place of E(F_t²).
    Asymptotic,
    /// Evaluate E(F_t²) by quadrature at the given horizon.
    Quadrature,
}

/// Budgeted tolerance for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target relative error of E(F_t²).
    pub rel_tol: f64,
    /// Cap on the number of Gauss-Kronrod rule applications.
    pub max_rule_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-3,
            max_rule_evals: 20_000,
        }
    }
}

/// Quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ef2Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub rule_evaluations: usize,
}

// ---------------------------------------------------------------------------
// Closed-form inner weight Ψ_t(a, b)
// ---------------------------------------------------------------------------

/// (e^x - 1)/x, stable near zero.
fn e1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::expm1(x) / x
    }
}

/// ∫₀¹ u e^{xu} du = (e^x (x-1) + 1)/x², stable near zero.
fn e2(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        0.5 + x * (1.0 / 3.0 + x * (0.125 + x / 30.0))
    } else {
        (libm::expm1(x) * (x - 1.0) + x) / (x * x)
    }
}

/// ∫_{d0}^{d1} (p + q d) e^{λ d + β} dd with λ d + β ≤ 0 at the anchored
/// endpoint, so no intermediate overflow.
fn linexp_piece(p: f64, q: f64, lam: f64, beta: f64, d0: f64, d1: f64) -> f64 {
    let w = d1 - d0;
    if w <= 0.0 {
        return 0.0;
    }
    if lam == 0.0 {
        return beta.exp() * (p * w + 0.5 * q * (d1 * d1 - d0 * d0));
    }
    let z = lam * w;
    if lam < 0.0 {
        // anchor at d0, exponent decreasing over the piece
        (lam * d0 + beta).exp() * w * ((p + q * d0) * e1(z) + q * w * e2(z))
    } else {
        // anchor at d1
        (lam * d1 + beta).exp() * w * ((p + q * d1) * e1(-z) - q * w * e2(-z))
    }
}

/// Ψ_t(a, b) = ∬ e^{-θ|x-y+(a-b)|} e^{-θ|x-y|} dx dy over the box where
/// both (x, y) and (x+a, y+b) stay inside [0, t].
///
/// Reducing along d = x - y leaves a trapezoidal overlap length against a
/// piecewise exponential, which integrates in closed form.
pub(crate) fn psi_weight(theta: f64, t: f64, a: f64, b: f64) -> f64 {
    let xa0 = (-a).max(0.0);
    let xa1 = t - a.max(0.0);
    let yb0 = (-b).max(0.0);
    let yb1 = t - b.max(0.0);
    if xa1 <= xa0 || yb1 <= yb0 {
        return 0.0;
    }
    // Trapezoid knots of the overlap length L(d).
    let k1 = xa0 - yb1;
    let k4 = xa1 - yb0;
    let (k2, k3) = {
        let p = xa0 - yb0;
        let q = xa1 - yb1;
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    };
    let plateau = k2 - k1;
    let delta = b - a;

    let mut cuts = [k1, k2, k3, k4, 0.0, delta];
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let (g_lo, g_hi) = (delta.min(0.0), delta.max(0.0));
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let d0 = w[0].max(k1);
        let d1 = w[1].min(k4);
        if d1 <= d0 {
            continue;
        }
        let dm = 0.5 * (d0 + d1);
        let (p, q) = if dm < k2 {
            (-k1, 1.0)
        } else if dm <= k3 {
            (plateau, 0.0)
        } else {
            (k4, -1.0)
        };
        let (lam, beta) = if dm < g_lo {
            (2.0 * theta, -theta * delta)
        } else if dm > g_hi {
            (-2.0 * theta, theta * delta)
        } else {
            (0.0, -theta * delta.abs())
        };
        total += linexp_piece(p, q, lam, beta, d0, d1);
    }
    total
}

// ---------------------------------------------------------------------------
// Adaptive 2D Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

// 15-point Kronrod extension of 7-point Gauss (positive abscissae).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Expanded 15-point arrays: nodes on [-1, 1], Kronrod weights, and Gauss
/// weights (zero at Kronrod-only nodes).
fn rule_arrays() -> ([f64; 15], [f64; 15], [f64; 15]) {
    let mut x = [0.0; 15];
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for j in 0..7 {
        x[j] = -XGK[j];
        x[14 - j] = XGK[j];
        wk[j] = WGK[j];
        wk[14 - j] = WGK[j];
        if j % 2 == 1 {
            wg[j] = WG[j / 2];
            wg[14 - j] = WG[j / 2];
        }
    }
    x[7] = 0.0;
    wk[7] = WGK[7];
    wg[7] = WG[3];
    (x, wk, wg)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    value: f64,
    err: f64,
    id: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.id == other.id
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error, id as deterministic tiebreak
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then(self.id.cmp(&other.id))
    }
}

struct Quad2d {
    x: [f64; 15],
    wk: [f64; 15],
    wg: [f64; 15],
}

impl Quad2d {
    fn new() -> Self {
        let (x, wk, wg) = rule_arrays();
        Self { x, wk, wg }
    }

    /// Tensor G7K15 on a rectangle: Kronrod value and |K - G| error estimate.
    fn apply<F: Fn(f64, f64) -> f64>(&self, f: &F, ax: f64, bx: f64, ay: f64, by: f64) -> (f64, f64) {
        let cx = 0.5 * (ax + bx);
        let hx = 0.5 * (bx - ax);
        let cy = 0.5 * (ay + by);
        let hy = 0.5 * (by - ay);
        let mut k = 0.0;
        let mut g = 0.0;
        for (i, &xi) in self.x.iter().enumerate() {
            let mut row_k = 0.0;
            let mut row_g = 0.0;
            for (j, &xj) in self.x.iter().enumerate() {
                let v = f(cx + hx * xi, cy + hy * xj);
                row_k += self.wk[j] * v;
                row_g += self.wg[j] * v;
            }
            k += self.wk[i] * row_k;
            g += self.wg[i] * row_g;
        }
        let scale = hx * hy;
        (k * scale, (k - g).abs() * scale)
    }
}

/// Adaptively integrate `f` over [0, sx] × [0, sy] to the requested relative
/// tolerance, seeding with a 4×4 panel grid.
fn adaptive_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    sx: f64,
    sy: f64,
    config: &QuadratureConfig,
) -> (f64, f64, usize, bool) {
    let rule = Quad2d::new();
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total_value = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0usize;
    let mut next_id = 0usize;

    let seed = 4usize;
    for i in 0..seed {
        for j in 0..seed {
            let ax = sx * i as f64 / seed as f64;
            let bx = sx * (i + 1) as f64 / seed as f64;
            let ay = sy * j as f64 / seed as f64;
            let by = sy * (j + 1) as f64 / seed as f64;
            let (value, err) = rule.apply(f, ax, bx, ay, by);
            evals += 1;
            total_value += value;
            total_err += err;
            heap.push(Panel {
                ax,
                bx,
                ay,
                by,
                value,
                err,
                id: next_id,
            });
            next_id += 1;
        }
    }

    let threshold =
        |value: f64, config: &QuadratureConfig| config.rel_tol * value.abs().max(1e-12);

    while total_err > threshold(total_value, config) {
        if evals + 4 > config.max_rule_evals {
            return (total_value, total_err, evals, false);
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        total_value -= worst.value;
        total_err -= worst.err;
        let mx = 0.5 * (worst.ax + worst.bx);
        let my = 0.5 * (worst.ay + worst.by);
        let children = [
            (worst.ax, mx, worst.ay, my),
            (mx, worst.bx, worst.ay, my),
            (worst.ax, mx, my, worst.by),
            (mx, worst.bx, my, worst.by),
        ];
        for (ax, bx, ay, by) in children {
            let (value, err) = rule.apply(f, ax, bx, ay, by);
            evals += 1;
            total_value += value;
            total_err += err;
            heap.push(Panel {
                ax,
                bx,
                ay,
                by,
                value,
                err,
                id: next_id,
            });
            next_id += 1;
        }
    }
    (total_value, total_err, evals, true)
}

/// The chaos variance `E(F_t²)` at the kernel's horizon, by adaptive
/// quadrature of the reduced 2D integral.
///
/// After the reduction to difference variables,
///
/// ```text
/// E(F_t²) = H²(2H-1)²/(2t) ∬_{[-t,t]²} |a|^{2H-2} |b|^{2H-2} Ψ_t(a, b) da db,
/// ```
///
/// and `Ψ_t(-a, -b) = Ψ_t(a, b)`, so two sign quadrants suffice. On each
/// quadrant the substitution `a = s^{1/(2H-1)}` turns `|a|^{2H-2} da` into
/// `ds/(2H-1)` exactly; the two kernel prefactors cancel into H², leaving
///
/// ```text
/// E(F_t²) = H²/t ∬_{[0,S]²} [Ψ_t(a(s), b(w)) + Ψ_t(a(s), -b(w))] ds dw,
/// ```
///
/// with S = t^{2H-1}. The transformed integrand is bounded and vanishes at
/// the former singularity, so plain adaptive panels converge quickly.
pub fn ef2(spec: KernelSpec, config: &QuadratureConfig) -> Result<Ef2Estimate, ConstantsError> {
    let h = spec.hurst().value();
    let t = spec.horizon();
    let theta = spec.theta();
    let c = 1.0 / (2.0 * h - 1.0);
    let s_max = t.powf(2.0 * h - 1.0);

    let integrand = |s: f64, w: f64| {
        let a = s.powf(c);
        let b = w.powf(c);
        psi_weight(theta, t, a, b) + psi_weight(theta, t, a, -b)
    };

    let (raw, raw_err, evals, converged) = adaptive_2d(&integrand, s_max, s_max, config);
    let scale = h * h / t;
    let value = scale * raw;
    let error_bound = scale * raw_err;
    if !converged {
        return Err(ConstantsError::ToleranceNotMet {
            rel_tol: config.rel_tol,
            value,
            error_bound,
        });
    }
    Ok(Ef2Estimate {
        value,
        error_bound,
        rule_evaluations: evals,
    })
}

/// The standardizing constant σ_t of the normalized drift error
/// `√t/σ_t (θ - θ~)`: `σ_t = √(E(F_t²)) / λ(θ, H)`, with the asymptotic
/// mode substituting the limit A(θ, H) for E(F_t²). At H = 1/2 the
/// asymptotic value is the classical √(2θ).
pub fn sigma(
    spec: KernelSpec,
    mode: SigmaMode,
    config: &QuadratureConfig,
) -> Result<f64, ConstantsError> {
    let lambda = lambda_const(spec.theta(), spec.hurst());
    let variance = match mode {
        SigmaMode::Asymptotic => big_a_const(spec.theta(), spec.hurst())?,
        SigmaMode::Quadrature => ef2(spec, config)?.value,
    };
    Ok(variance.sqrt() / lambda)
}
