//! The smooth Wu-Sprung potential: the implicit map x(V), its numerical
//! inverse V(x), closed-form smooth turning points, and the Dominici power
//! series approximation of the inverse.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::zeros::ZeroTable;

/// Well depth V0 = 3.10073 pi.
pub const V0: f64 = 3.10073 * PI;

/// Tolerance on |x(V) - x| for the numerical inverse.
const INVERSE_TOL: f64 = 1e-12;

/// Configuration for [`SmoothPotential`].
#[derive(Debug, Clone)]
pub struct PotentialConfig {
    /// Ceiling for the inverse search: V(x) is invertible on [0, x(max_v)].
    pub max_v: f64,
    /// Grid spacing (in x) of the monotone interpolation cache seeding the
    /// Newton solve; `None` disables the cache.
    pub cache_resolution: Option<f64>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            max_v: 400.0,
            cache_resolution: Some(1.0 / 40.0),
        }
    }
}

/// Node of the interpolation cache: position, value, and slope dV/dx.
#[derive(Debug, Clone, Copy)]
struct CacheNode {
    v: f64,
    dv_dx: f64,
}

/// The smooth Wu-Sprung potential, immutable after construction.
#[derive(Debug, Clone)]
pub struct SmoothPotential {
    max_v: f64,
    x_max: f64,
    cache_step: f64,
    cache: Vec<CacheNode>,
}

impl SmoothPotential {
    pub fn new(config: PotentialConfig) -> Result<Self> {
        if config.max_v <= V0 {
            return Err(Error::InvalidArgument(format!(
                "max_v must exceed V0 = {V0}, got {}",
                config.max_v
            )));
        }
        let x_max = x_of_v_unchecked(config.max_v);
        let mut potential = Self {
            max_v: config.max_v,
            x_max,
            cache_step: 0.0,
            cache: Vec::new(),
        };
        if let Some(step) = config.cache_resolution {
            if !(step > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "cache resolution must be positive, got {step}"
                )));
            }
            let n = (x_max / step).ceil() as usize + 1;
            let mut cache = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let x = (i as f64 * step).min(x_max);
                let v = potential.invert_direct(x)?;
                let dv_dx = if v <= V0 { 0.0 } else { 1.0 / dx_dv(v) };
                cache.push(CacheNode { v, dv_dx });
            }
            potential.cache_step = step;
            potential.cache = cache;
        }
        Ok(potential)
    }

    /// Default construction: max_v = 400, cache resolution 1/40.
    pub fn with_defaults() -> Self {
        Self::new(PotentialConfig::default()).expect("default config is valid")
    }

    pub fn without_cache() -> Self {
        Self::new(PotentialConfig {
            cache_resolution: None,
            ..PotentialConfig::default()
        })
        .expect("config is valid")
    }

    /// A potential whose invertible range covers turning points for all
    /// levels up to `lambda_max`.
    pub fn covering(lambda_max: f64) -> Result<Self> {
        Self::new(PotentialConfig {
            max_v: (lambda_max + V0) * 1.05 + 10.0,
            ..PotentialConfig::default()
        })
    }

    pub fn max_v(&self) -> f64 {
        self.max_v
    }

    /// Largest invertible x.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// The implicit Wu-Sprung relation x(V), for V >= V0.
    pub fn x_of_v(&self, v: f64) -> Result<f64> {
        if v < V0 {
            return Err(Error::OutOfRange {
                quantity: "V",
                value: v,
                detail: format!("x(V) requires V >= V0 = {V0}"),
            });
        }
        Ok(x_of_v_unchecked(v))
    }

    /// Numerical inverse V(x) with |x(V) - x| < 1e-10.
    pub fn v_of_x(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.x_max).contains(&x) {
            return Err(Error::OutOfRange {
                quantity: "x",
                value: x,
                detail: format!("inverse available on [0, {:.6}]; raise max_v to extend", self.x_max),
            });
        }
        if x == 0.0 {
            return Ok(V0);
        }
        if self.cache.is_empty() {
            self.invert_direct(x)
        } else {
            let guess = self.cache_eval(x);
            self.newton_polish(x, guess)
        }
    }

    /// Raw monotone-cubic cache interpolation (fast path before polishing);
    /// exposed for cross-validation against the direct solve.
    pub fn v_of_x_cached_raw(&self, x: f64) -> Option<f64> {
        if self.cache.is_empty() || !(0.0..=self.x_max).contains(&x) {
            return None;
        }
        Some(self.cache_eval(x))
    }

    /// Turning point of the translated smooth potential: V(x) - V0 = lambda.
    pub fn smooth_turning_point(&self, lambda: f64) -> Result<f64> {
        if lambda <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "turning point requires a positive level, got {lambda}"
            )));
        }
        self.x_of_v(lambda + V0)
    }

    /// Turning points for the first `n` zeros of `table`.
    pub fn turning_points(&self, table: &ZeroTable, n: usize) -> Result<Vec<f64>> {
        if n > table.len() {
            return Err(Error::TooFewZeros {
                requested: n,
                available: table.len(),
            });
        }
        table.values()[..n]
            .iter()
            .map(|&lambda| self.smooth_turning_point(lambda))
            .collect()
    }

    fn cache_eval(&self, x: f64) -> f64 {
        let idx = ((x / self.cache_step) as usize).min(self.cache.len() - 2);
        let x0 = idx as f64 * self.cache_step;
        let h = (((idx + 1) as f64 * self.cache_step).min(self.x_max) - x0).max(f64::MIN_POSITIVE);
        let t = ((x - x0) / h).clamp(0.0, 1.0);
        let a = self.cache[idx];
        let b = self.cache[idx + 1];
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * a.v
            + (t3 - 2.0 * t2 + t) * h * a.dv_dx
            + (-2.0 * t3 + 3.0 * t2) * b.v
            + (t3 - t2) * h * b.dv_dx
    }

    fn newton_polish(&self, x: f64, guess: f64) -> Result<f64> {
        let mut v = guess.clamp(V0, self.max_v);
        let mut lo = V0;
        let mut hi = self.max_v;
        for _ in 0..200 {
            let fx = x_of_v_unchecked(v) - x;
            if fx.abs() < INVERSE_TOL {
                return Ok(v);
            }
            if fx > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let step = fx * dx_dv(v).recip();
            let next = v - step;
            v = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        self.invert_direct(x)
    }

    fn invert_direct(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(V0);
        }
        let mut lo = V0;
        let mut hi = self.max_v;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            let fx = x_of_v_unchecked(mid) - x;
            if fx.abs() < INVERSE_TOL || hi - lo < f64::EPSILON * hi {
                return Ok(mid);
            }
            if fx > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Dominici power-series approximation of V(x) using the first
    /// `terms` (1..=3) coefficients.
    pub fn dominici_series(&self, x: f64, terms: usize) -> Result<f64> {
        if !(1..=3).contains(&terms) {
            return Err(Error::InvalidArgument(format!(
                "dominici_series supports 1..=3 terms, got {terms}"
            )));
        }
        let omega = dominici_omega();
        if (PI * x * omega).abs() >= 1.0 {
            return Err(Error::OutOfRange {
                quantity: "x",
                value: x,
                detail: format!(
                    "series guard |pi x omega| < 1 requires x < {:.6}",
                    1.0 / (PI * omega)
                ),
            });
        }
        let a = dominici_coefficients();
        let mut v = V0;
        for (k, ak) in a.iter().take(terms).enumerate() {
            let k1 = (k + 1) as i32;
            v += ak * (PI * x).powi(2 * k1) * omega.powi(2 * k1 - 1) * (-V0).powi(1 - k1);
        }
        Ok(v)
    }
}

/// x(V) evaluated without the V >= V0 check.
fn x_of_v_unchecked(v: f64) -> f64 {
    if v <= V0 {
        return 0.0;
    }
    let s = v.sqrt();
    let d = (v - V0).sqrt();
    (d * (V0 / (2.0 * PI * E * E)).ln() + s * ((s + d) / (s - d)).ln()) / PI
}

/// dx/dV for V > V0; simplifies to
/// [ln(V0/2pi)/sqrt(V-V0) + ln((sqrt V + sqrt(V-V0))/(sqrt V - sqrt(V-V0)))/sqrt V] / (2 pi).
fn dx_dv(v: f64) -> f64 {
    let s = v.sqrt();
    let d = (v - V0).sqrt();
    ((V0 / (2.0 * PI)).ln() / d + ((s + d) / (s - d)).ln() / s) / (2.0 * PI)
}

/// omega = 1 / ln(V0 / 2pi).
pub fn dominici_omega() -> f64 {
    1.0 / (V0 / (2.0 * PI)).ln()
}

/// The first three series coefficients (a1, a2, a3) =
/// (omega, 4 omega^2 / 3, 8 omega^2 / 15 + 28 omega^3 / 9).
pub fn dominici_coefficients() -> [f64; 3] {
    let w = dominici_omega();
    [
        w,
        4.0 / 3.0 * w * w,
        8.0 / 15.0 * w * w + 28.0 / 9.0 * w * w * w,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn x_vanishes_at_well_bottom() {
        let p = SmoothPotential::with_defaults();
        assert_eq!(p.x_of_v(V0).unwrap(), 0.0);
    }

    #[test]
    fn x_at_first_level() {
        let p = SmoothPotential::with_defaults();
        assert_abs_diff_eq!(p.x_of_v(14.134725 + V0).unwrap(), 1.30083, epsilon = 1e-5);
    }

    #[test]
    fn x_monotone_in_v() {
        let p = SmoothPotential::with_defaults();
        let mut prev = 0.0;
        for i in 1..=1000 {
            let v = V0 + (p.max_v() - V0) * i as f64 / 1000.0;
            let x = p.x_of_v(v).unwrap();
            assert!(x > prev, "x(V) not increasing at V = {v}");
            prev = x;
        }
    }

    #[test]
    fn x_rejects_below_v0() {
        let p = SmoothPotential::with_defaults();
        assert!(p.x_of_v(V0 - 0.1).is_err());
    }

    #[test]
    fn inverse_at_origin() {
        let p = SmoothPotential::with_defaults();
        assert_eq!(p.v_of_x(0.0).unwrap(), V0);
    }

    #[test]
    fn inverse_matches_first_peak_value() {
        let p = SmoothPotential::with_defaults();
        let v = p.v_of_x(1.30083).unwrap();
        assert_abs_diff_eq!(v, 14.134725 + V0, epsilon = 1e-4);
    }

    #[test]
    fn inverse_round_trip() {
        let p = SmoothPotential::with_defaults();
        // deterministic pseudo-random sample of [0, 16]
        let mut state = 0x2545f4914f6cdd1du64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = 16.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
            let v = p.v_of_x(x).unwrap();
            assert!((p.x_of_v(v).unwrap() - x).abs() < 1e-8, "round trip failed at x = {x}");
        }
    }

    #[test]
    fn cached_interpolation_agrees_with_direct_solve() {
        let cached = SmoothPotential::with_defaults();
        let direct = SmoothPotential::without_cache();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = cached.x_max() * (state >> 11) as f64 / (1u64 << 53) as f64;
            let a = cached.v_of_x(x).unwrap();
            let b = direct.v_of_x(x).unwrap();
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-8, "cached/direct disagreement {worst:.3e}");
    }

    #[test]
    fn raw_cache_is_close_even_before_polish() {
        let p = SmoothPotential::with_defaults();
        for i in 1..200 {
            let x = i as f64 * 0.05;
            let raw = p.v_of_x_cached_raw(x).unwrap();
            let exact = p.v_of_x(x).unwrap();
            assert!((raw - exact).abs() < 1e-4, "raw cache off by {} at {x}", raw - exact);
        }
    }

    #[test]
    fn smooth_turning_points_first_eight() {
        let p = SmoothPotential::with_defaults();
        let table = ZeroTable::reference();
        let expected = [1.30083, 1.87866, 2.20626, 2.64243, 2.84142, 3.20489, 3.4613, 3.64459];
        for (j, want) in expected.iter().enumerate() {
            let x = p.smooth_turning_point(table.lambda(j + 1)).unwrap();
            assert_abs_diff_eq!(x, want, epsilon = 1e-4);
        }
    }

    #[test]
    fn smooth_turning_point_level_100() {
        let p = SmoothPotential::with_defaults();
        let x = p.smooth_turning_point(ZeroTable::reference().lambda(100)).unwrap();
        assert_abs_diff_eq!(x, 15.315, epsilon = 1e-3);
    }

    #[test]
    fn turning_point_level_recovery() {
        // V(x_j) - V0 = lambda_j to 1e-8 for all table zeros within range
        let p = SmoothPotential::with_defaults();
        let table = ZeroTable::reference();
        for j in (1..=100).step_by(7) {
            let lambda = table.lambda(j);
            let x = p.smooth_turning_point(lambda).unwrap();
            assert!((p.v_of_x(x).unwrap() - V0 - lambda).abs() < 1e-8);
        }
    }

    #[test]
    fn dominici_at_origin_is_v0() {
        let p = SmoothPotential::with_defaults();
        for terms in 1..=3 {
            assert_eq!(p.dominici_series(0.0, terms).unwrap(), V0);
        }
    }

    #[test]
    fn dominici_coefficient_formulas() {
        let w = dominici_omega();
        let [a1, a2, a3] = dominici_coefficients();
        assert_abs_diff_eq!(a1, w, epsilon = 1e-12);
        assert_abs_diff_eq!(a2, 4.0 * w * w / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a3, 8.0 * w * w / 15.0 + 28.0 * w * w * w / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn dominici_converges_near_origin() {
        // within the guard radius the k-term errors shrink monotonically
        let p = SmoothPotential::with_defaults();
        for &x in &[0.02, 0.05, 0.08, 0.1] {
            let exact = p.v_of_x(x).unwrap();
            let errs: Vec<f64> = (1..=3)
                .map(|k| (p.dominici_series(x, k).unwrap() - exact).abs())
                .collect();
            assert!(errs[1] < errs[0] && errs[2] < errs[1], "no convergence at x = {x}: {errs:?}");
        }
    }

    #[test]
    fn dominici_three_terms_accuracy() {
        // relative accuracy of the 3-term expansion on the inner half of the
        // guard radius (x < 0.1): better than 1e-3
        let p = SmoothPotential::with_defaults();
        for i in 1..=20 {
            let x = 0.1 * i as f64 / 20.0;
            let exact = p.v_of_x(x).unwrap();
            let approx = p.dominici_series(x, 3).unwrap();
            assert!(((approx - exact) / exact).abs() < 1e-3, "x = {x}");
        }
    }

    #[test]
    fn dominici_guard() {
        let p = SmoothPotential::with_defaults();
        // guard radius is 1/(pi omega) ~ 0.1396
        assert!(p.dominici_series(0.2, 3).is_err());
        assert!(p.dominici_series(0.1, 4).is_err());
        assert!(p.dominici_series(0.1, 0).is_err());
    }

    #[test]
    fn range_errors() {
        let p = SmoothPotential::with_defaults();
        assert!(p.v_of_x(p.x_max() + 1.0).is_err());
        assert!(p.v_of_x(-0.5).is_err());
        assert!(p.smooth_turning_point(-1.0).is_err());
    }

    #[test]
    fn covering_extends_range() {
        let p = SmoothPotential::covering(600.0).unwrap();
        assert!(p.max_v() > 600.0 + V0);
        assert!(p.smooth_turning_point(600.0).is_ok());
    }
}
