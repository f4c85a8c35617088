//! The fractal CBC quantization integral
//!
//! ```text
//! I_j = (2 / Gamma(beta)) * INT_{-x_j}^{x_j} sqrt(max(0, lambda_j - Phi^2(x')))
//!       * (x_j - x')^{beta - 1} dx'
//! ```
//!
//! with the Abel-kernel singularity at the upper endpoint removed by the
//! power substitution u = x_j - x' = s^{1/beta} (default) or absorbed into
//! Gauss-Jacobi weights (alternative, mainly for benchmarking). Quantization
//! holds when I_j = j pi; reports carry the ratios I_j / (j pi).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_g9;
use crate::fractal::{phi_squared, FractalParams};
use crate::potential::SmoothPotential;
use crate::special::gamma;
use crate::zeros::ZeroTable;

/// Singularity-handling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    /// u = s^{1/beta}: the kernel becomes a constant factor and the
    /// transformed integrand is integrated by adaptive Gauss-Kronrod panels.
    PowerSub,
    /// Gauss-Jacobi rule with weight (1-u)^{beta-1} on [-1, 1], node count
    /// doubled until convergence.
    GaussJacobi,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureConfig {
    /// Kernel exponent, = D/2; must lie in (0, 1).
    pub beta: f64,
    /// Evaluation budget per integral.
    pub node_budget: usize,
    /// Relative convergence target (< 1e-4).
    pub rel_tol: f64,
    pub substitution: Substitution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            beta: 0.75,
            node_budget: 500_000,
            rel_tol: 1e-8,
            substitution: Substitution::PowerSub,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel exponent beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-4) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1e-4), got {}",
                self.rel_tol
            )));
        }
        if self.node_budget == 0 {
            return Err(Error::InvalidArgument("node_budget must be positive".into()));
        }
        Ok(())
    }

    /// Config with the exponent implied by a fractal dimension.
    pub fn for_dimension(d: f64) -> Self {
        Self { beta: d / 2.0, ..Self::default() }
    }
}

/// Converged CBC integral with diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct CbcIntegral {
    pub value: f64,
    pub evaluations: usize,
    /// Change of the total produced by the final refinement step.
    pub last_refinement_delta: f64,
}

/// Per-level record of a CBC evaluation.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct CbcRecord {
    pub j: usize,
    pub lambda: f64,
    pub x: f64,
    pub integral: f64,
    pub ratio: f64,
}

/// CBC integrals and ratios for a sequence of levels.
#[derive(Debug, Clone, Serialize, serde::Deserialize, Default)]
pub struct CbcReport {
    pub records: Vec<CbcRecord>,
}

impl CbcReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ratio).collect()
    }

    /// CSV serialization with header `j,lambda,x,integral,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,lambda,x,integral,ratio\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.j,
                format_g9(r.lambda),
                format_g9(r.x),
                format_g9(r.integral),
                format_g9(r.ratio)
            ));
        }
        out
    }
}

/// Evaluate the CBC integral for one level.
///
/// `phi2` must be even and evaluable on [-x_t, x_t]; the integrand clamps
/// negative values of lambda - phi2 to zero, which is the real part of the
/// square root.
pub fn cbc_integral<F>(lambda: f64, x_t: f64, phi2: F, config: &QuadratureConfig) -> Result<CbcIntegral>
where
    F: Fn(f64) -> Result<f64>,
{
    config.validate()?;
    if !(x_t > 0.0) {
        return Err(Error::OutOfRange {
            quantity: "x_t",
            value: x_t,
            detail: "turning point must be positive".to_string(),
        });
    }
    // probe the endpoints so domain errors surface before quadrature starts
    phi2(x_t)?;
    phi2(-x_t)?;
    let g = |x: f64| -> Result<f64> { Ok((lambda - phi2(x)?).max(0.0).sqrt()) };
    let prefactor = 2.0 / gamma(config.beta);
    match config.substitution {
        Substitution::PowerSub => {
            // INT_{-xt}^{xt} g (xt - x')^{beta-1} dx' = (1/beta) INT_0^S g(xt - s^{1/beta}) ds
            let s_top = (2.0 * x_t).powf(config.beta);
            let inv_beta = 1.0 / config.beta;
            let h = |s: f64| g(x_t - s.powf(inv_beta));
            let out = adaptive_gk15(&h, 0.0, s_top, config.rel_tol, config.node_budget)?;
            Ok(CbcIntegral {
                value: prefactor * inv_beta * out.value,
                evaluations: out.evaluations,
                last_refinement_delta: prefactor * inv_beta * out.last_delta,
            })
        }
        Substitution::GaussJacobi => {
            let out = gauss_jacobi_doubling(&g, x_t, config)?;
            Ok(CbcIntegral {
                value: prefactor * out.value,
                evaluations: out.evaluations,
                last_refinement_delta: prefactor * out.last_delta,
            })
        }
    }
}

/// CBC report for levels j = 1..=x.len(), with lambda_j from `zeros`.
pub fn cbc_ratio_series(
    zeros: &ZeroTable,
    x: &[f64],
    potential: &SmoothPotential,
    params: &FractalParams,
    config: &QuadratureConfig,
) -> Result<CbcReport> {
    if zeros.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} zeros vs {} turning points",
            zeros.len(),
            x.len()
        )));
    }
    let mut records = Vec::with_capacity(x.len());
    for (idx, (&x_j, &lambda)) in x.iter().zip(zeros.values()).enumerate() {
        let j = idx + 1;
        let integral = cbc_integral(
            lambda,
            x_j,
            |t| phi_squared(t, potential, params),
            config,
        )?
        .value;
        records.push(CbcRecord {
            j,
            lambda,
            x: x_j,
            integral,
            ratio: integral / (j as f64 * std::f64::consts::PI),
        });
    }
    Ok(CbcReport { records })
}

/// Search `interval` for the turning point whose CBC ratio is closest to 1:
/// a 400-point grid scan followed by golden-section refinement. Returns the
/// best x and its ratio.
pub fn adjust_turning_point<F>(
    j: usize,
    lambda: f64,
    phi2: F,
    config: &QuadratureConfig,
    interval: (f64, f64),
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = interval;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!(
            "adjustment interval ({lo}, {hi}) is empty or not positive"
        )));
    }
    let target = j as f64 * std::f64::consts::PI;
    let ratio_at = |x: f64| -> Result<f64> {
        Ok(cbc_integral(lambda, x, &phi2, config)?.value / target)
    };
    if lo == hi {
        let r = ratio_at(lo)?;
        return Ok((lo, r));
    }

    const GRID: usize = 400;
    let mut best_idx = 0;
    let mut best_obj = f64::INFINITY;
    let mut grid = Vec::with_capacity(GRID);
    let mut evaluable = 0usize;
    for i in 0..GRID {
        let x = lo + (hi - lo) * i as f64 / (GRID - 1) as f64;
        let obj = match ratio_at(x) {
            Ok(r) => {
                evaluable += 1;
                (r - 1.0).abs()
            }
            Err(_) => f64::INFINITY,
        };
        grid.push(x);
        if obj < best_obj {
            best_obj = obj;
            best_idx = i;
        }
    }
    if evaluable == 0 {
        return Err(Error::InvalidArgument(
            "no evaluable point in adjustment interval".to_string(),
        ));
    }

    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(GRID - 1)];
    // golden-section on |ratio - 1| within the bracketing grid cell pair
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = ratio_at(x1).map(|r| (r - 1.0).abs()).unwrap_or(f64::INFINITY);
    let mut f2 = ratio_at(x2).map(|r| (r - 1.0).abs()).unwrap_or(f64::INFINITY);
    for _ in 0..80 {
        if b - a < 1e-10 * b.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = ratio_at(x1).map(|r| (r - 1.0).abs()).unwrap_or(f64::INFINITY);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = ratio_at(x2).map(|r| (r - 1.0).abs()).unwrap_or(f64::INFINITY);
        }
    }
    let x_best = if f1 <= f2 { x1 } else { x2 };
    let r_best = ratio_at(x_best)?;
    // keep the grid optimum if refinement failed to beat it
    if (r_best - 1.0).abs() <= best_obj {
        Ok((x_best, r_best))
    } else {
        let x = grid[best_idx];
        let r = ratio_at(x)?;
        Ok((x, r))
    }
}

/// Default adjustment search interval: (0, 1.05 * x_smooth].
pub fn default_adjust_interval(x_smooth: f64) -> (f64, f64) {
    (1e-4, 1.05 * x_smooth)
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (G7, K15)
// ---------------------------------------------------------------------------

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];
const GK15_WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

struct PanelResult {
    integral: f64,
    error: f64,
}

fn gk15_panel<F>(f: &F, a: f64, b: f64) -> Result<PanelResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * GK15_WGK[7];
    let mut gauss = fc * GK15_WG[3];
    for (i, &node) in GK15_NODES.iter().enumerate().take(7) {
        let dx = half * node;
        let fsum = f(center - dx)? + f(center + dx)?;
        kronrod += GK15_WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += GK15_WG[i / 2] * fsum;
        }
    }
    Ok(PanelResult {
        integral: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

struct AdaptiveOutput {
    value: f64,
    evaluations: usize,
    last_delta: f64,
}

/// Globally adaptive bisection: repeatedly split the interval with the
/// largest error estimate until the summed estimate meets `rel_tol`.
fn adaptive_gk15<F>(f: &F, a: f64, b: f64, rel_tol: f64, budget: usize) -> Result<AdaptiveOutput>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(AdaptiveOutput { value: 0.0, evaluations: 0, last_delta: 0.0 });
    }
    struct Seg {
        a: f64,
        b: f64,
        integral: f64,
        error: f64,
    }
    let first = gk15_panel(f, a, b)?;
    let mut segs = vec![Seg { a, b, integral: first.integral, error: first.error }];
    let mut evaluations = 15usize;
    let mut last_delta = f64::INFINITY;
    loop {
        let total: f64 = segs.iter().map(|s| s.integral).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= rel_tol * total.abs().max(f64::MIN_POSITIVE) || err < 1e-300 {
            return Ok(AdaptiveOutput { value: total, evaluations, last_delta });
        }
        if evaluations + 30 > budget {
            return Err(Error::QuadratureBudget { evaluations, error: err });
        }
        // split the worst segment (leftmost among ties, for determinism)
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.error > segs[worst].error {
                worst = i;
            }
        }
        let Seg { a: sa, b: sb, integral: old, .. } = segs.swap_remove(worst);
        let mid = 0.5 * (sa + sb);
        let left = gk15_panel(f, sa, mid)?;
        let right = gk15_panel(f, mid, sb)?;
        evaluations += 30;
        last_delta = (left.integral + right.integral - old).abs();
        segs.push(Seg { a: sa, b: mid, integral: left.integral, error: left.error });
        segs.push(Seg { a: mid, b: sb, integral: right.integral, error: right.error });
    }
}

// ---------------------------------------------------------------------------
// Gauss-Jacobi alternative
// ---------------------------------------------------------------------------

/// Nodes and weights for INT_{-1}^{1} (1-x)^alpha f(x) dx (Jacobi weight with
/// beta = 0), from the symmetric tridiagonal Jacobi matrix: eigenvalues by
/// implicit-shift QL, weights from the Christoffel function.
fn gauss_jacobi_nodes(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    // three-term recurrence coefficients of monic Jacobi polynomials (beta=0)
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n); // off[k] = sqrt(b_{k+1})
    for k in 0..n {
        let kf = k as f64;
        let a_k = if k == 0 {
            -alpha / (alpha + 2.0)
        } else {
            -(alpha * alpha) / ((2.0 * kf + alpha) * (2.0 * kf + alpha + 2.0))
        };
        diag.push(a_k);
        if k + 1 < n {
            let k1 = kf + 1.0;
            let b_k = 4.0 * k1 * k1 * (k1 + alpha) * (k1 + alpha)
                / ((2.0 * k1 + alpha).powi(2) * (2.0 * k1 + alpha + 1.0) * (2.0 * k1 + alpha - 1.0));
            off.push(b_k.sqrt());
        }
    }
    let nodes = symmetric_tridiagonal_eigenvalues(&mut diag, &mut off);
    // weights: w_i = mu0 / sum_k p_k(x_i)^2 with orthonormal p_k
    let mu0 = 2.0f64.powf(alpha + 1.0) / (alpha + 1.0);
    let mut weights = Vec::with_capacity(n);
    for &x in &nodes {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut sum = p * p;
        for k in 0..n - 1 {
            let kf = k as f64;
            let a_k = if k == 0 {
                -alpha / (alpha + 2.0)
            } else {
                -(alpha * alpha) / ((2.0 * kf + alpha) * (2.0 * kf + alpha + 2.0))
            };
            let k1 = kf + 1.0;
            let b_next = (4.0 * k1 * k1 * (k1 + alpha) * (k1 + alpha)
                / ((2.0 * k1 + alpha).powi(2) * (2.0 * k1 + alpha + 1.0) * (2.0 * k1 + alpha - 1.0)))
                .sqrt();
            let b_prev = if k == 0 {
                0.0
            } else {
                (4.0 * kf * kf * (kf + alpha) * (kf + alpha)
                    / ((2.0 * kf + alpha).powi(2) * (2.0 * kf + alpha + 1.0) * (2.0 * kf + alpha - 1.0)))
                    .sqrt()
            };
            let p_next = ((x - a_k) * p - b_prev * p_prev) / b_next;
            p_prev = p;
            p = p_next;
            sum += p * p;
        }
        weights.push(1.0 / sum);
    }
    (nodes, weights)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method
/// with Wilkinson shifts (values only), returned ascending.
fn symmetric_tridiagonal_eigenvalues(diag: &mut [f64], off: &mut Vec<f64>) -> Vec<f64> {
    let n = diag.len();
    off.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    off.pop();
    let mut vals = diag.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

fn gauss_jacobi_doubling<F>(g: &F, x_t: f64, config: &QuadratureConfig) -> Result<AdaptiveOutput>
where
    F: Fn(f64) -> Result<f64>,
{
    // INT_{-xt}^{xt} g(x) (xt-x)^{beta-1} dx = xt^beta INT_{-1}^{1} (1-u)^{beta-1} g(xt u) du
    let alpha = config.beta - 1.0;
    let scale = x_t.powf(config.beta);
    let mut n = 16usize;
    let mut prev = f64::NAN;
    let mut evaluations = 0usize;
    loop {
        if evaluations + n > config.node_budget {
            return Err(Error::QuadratureBudget {
                evaluations,
                error: (prev).abs() * config.rel_tol,
            });
        }
        let (nodes, weights) = gauss_jacobi_nodes(n, alpha);
        let mut total = 0.0;
        for (u, w) in nodes.iter().zip(&weights) {
            total += w * g(x_t * u)?;
        }
        evaluations += n;
        let value = scale * total;
        if !prev.is_nan() {
            let delta = (value - prev).abs();
            if delta <= config.rel_tol * value.abs().max(f64::MIN_POSITIVE) {
                return Ok(AdaptiveOutput { value, evaluations, last_delta: delta });
            }
        }
        prev = value;
        n *= 2;
    }
}
