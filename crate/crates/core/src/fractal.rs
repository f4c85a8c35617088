//! Truncated Weierstrass fractal contribution and assembly of the
//! supersymmetric potential-squared.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{SmoothPotential, V0};

/// Parameters of the truncated Weierstrass contribution.
///
/// `phases` are scaled: the physical phase is `2 pi alpha_k`. The truncated
/// sum runs k = 1..=m, matching the number of fitted phases.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FractalParams {
    /// Frequency base, > 1.
    pub gamma: f64,
    /// Scale on the fractal contribution (1 in the unscaled model).
    pub sigma: f64,
    /// Fractal dimension D in (1, 2); the CBC kernel exponent is beta = D/2.
    pub d: f64,
    /// Scaled phases alpha_k; list length sets the truncation order m.
    pub phases: Vec<f64>,
}

impl FractalParams {
    pub fn new(gamma: f64, sigma: f64, phases: Vec<f64>) -> Result<Self> {
        Self::with_dimension(gamma, sigma, 1.5, phases)
    }

    pub fn with_dimension(gamma: f64, sigma: f64, d: f64, phases: Vec<f64>) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Weierstrass frequency base must exceed 1, got {gamma}"
            )));
        }
        if !(sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale sigma must be nonnegative, got {sigma}"
            )));
        }
        if !(1.0 < d && d < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "fractal dimension must lie in (1, 2), got {d}"
            )));
        }
        // scaled phases live in [0, 1] by default, or [-1/2, 1/2] under the
        // alternative bound convention
        for (k, &a) in phases.iter().enumerate() {
            if !(-0.5..=1.0).contains(&a) {
                return Err(Error::InvalidArgument(format!(
                    "scaled phase alpha_{} = {a} outside [-1/2, 1]",
                    k + 1
                )));
            }
        }
        Ok(Self { gamma, sigma, d, phases })
    }

    /// Phases all zero (physical phase 0), truncation order `m`.
    pub fn zero_phases(gamma: f64, sigma: f64, m: usize) -> Result<Self> {
        Self::new(gamma, sigma, vec![0.0; m])
    }

    /// Truncation order of the Weierstrass sum.
    pub fn m(&self) -> usize {
        self.phases.len()
    }

    /// CBC kernel exponent beta = D/2.
    pub fn beta(&self) -> f64 {
        self.d / 2.0
    }

    /// Convert physical phases to scaled ones, wrapping into [0, 1).
    /// The real part cos(2 pi alpha) is 1-periodic in alpha, so wrapping is
    /// exact; published phase lists round slightly above 2 pi.
    pub fn scale_physical_phases(physical: &[f64]) -> Vec<f64> {
        physical.iter().map(|p| (p / TAU).rem_euclid(1.0)).collect()
    }
}

/// The symmetrized real Weierstrass contribution
/// F(x) = 2 sum_{k=1..m} (1 - cos(x gamma^k)) cos(2 pi alpha_k) / gamma^{k(2-D)}.
pub fn weierstrass_real(x: f64, params: &FractalParams) -> f64 {
    let decay = params.gamma.powf(-(2.0 - params.d));
    let mut freq = 1.0;
    let mut weight = 1.0;
    let mut sum = 0.0;
    for alpha in &params.phases {
        freq *= params.gamma;
        weight *= decay;
        sum += (1.0 - (x * freq).cos()) * (TAU * alpha).cos() * weight;
    }
    2.0 * sum
}

/// Affine-transformed fractal curve, `scale * F(x) + offset`.
pub fn affine_weierstrass(x: f64, params: &FractalParams, scale: f64, offset: f64) -> f64 {
    scale * weierstrass_real(x, params) + offset
}

/// The supersymmetric potential-squared
/// Phi^2(x) = V(|x|) - V0 + sigma F(x); even in x and zero at the origin.
pub fn phi_squared(x: f64, potential: &SmoothPotential, params: &FractalParams) -> Result<f64> {
    let smooth = potential.v_of_x(x.abs())? - V0;
    Ok(smooth + params.sigma * weierstrass_real(x, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::ZeroTable;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(gamma: f64, sigma: f64, phases: Vec<f64>) -> FractalParams {
        FractalParams::new(gamma, sigma, phases).unwrap()
    }

    #[test]
    fn vanishes_at_origin() {
        let p = params(2.5, 1.0, vec![0.1, 0.6, 0.9]);
        assert_eq!(weierstrass_real(0.0, &p), 0.0);
    }

    #[test]
    fn quarter_phases_have_zero_real_part() {
        let p = params(3.0, 1.0, vec![0.75; 12]);
        for i in 0..50 {
            let x = -3.0 + 0.13 * i as f64;
            assert_abs_diff_eq!(weierstrass_real(x, &p), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_term_hand_value() {
        // gamma = 2, alpha = 0, D = 3/2, x = pi/2: 2 (1 - cos pi) / sqrt 2
        let p = params(2.0, 1.0, vec![0.0]);
        assert_abs_diff_eq!(
            weierstrass_real(std::f64::consts::FRAC_PI_2, &p),
            2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn affine_identity_and_degenerate() {
        let p = params(2.3, 1.0, vec![0.0; 5]);
        let x = 1.7;
        assert_eq!(affine_weierstrass(x, &p, 1.0, 0.0), weierstrass_real(x, &p));
        assert_eq!(affine_weierstrass(x, &p, 0.0, -10.0), -10.0);
        // the rescaled curve used for visual comparison: 5 F(x) - 10
        assert_abs_diff_eq!(
            affine_weierstrass(x, &p, 5.0, -10.0),
            5.0 * weierstrass_real(x, &p) - 10.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn phi_squared_zero_at_origin() {
        let potential = SmoothPotential::with_defaults();
        let p = params(2.18081, 3.92036, vec![0.15, 0.4, 0.9]);
        assert_eq!(phi_squared(0.0, &potential, &p).unwrap(), 0.0);
    }

    #[test]
    fn phi_squared_reduces_to_smooth_at_sigma_zero() {
        let potential = SmoothPotential::with_defaults();
        let table = ZeroTable::reference();
        let p = params(3.0, 0.0, vec![0.3; 8]);
        for j in 1..=8 {
            let lambda = table.lambda(j);
            let x = potential.smooth_turning_point(lambda).unwrap();
            assert_abs_diff_eq!(phi_squared(x, &potential, &p).unwrap(), lambda, epsilon = 1e-8);
        }
    }

    #[test]
    fn seven_parameter_replay_sum_of_squares() {
        // published joint fit: gamma = 2.18081, sigma = 3.92036, the seven
        // physical phases and turning points; residual sum against the first
        // seven zeros is 13.703 - 8.48114 = 5.22186
        let potential = SmoothPotential::with_defaults();
        let phases = FractalParams::scale_physical_phases(&[
            0.915274, 6.28319, 6.28319, 1.20429, 5.33637, 0.700917, 0.0,
        ]);
        let p = params(2.18081, 3.92036, phases);
        let xs = [0.321253, 0.676572, 0.936234, 1.65921, 1.79613, 2.1688, 2.18378];
        let table = ZeroTable::reference();
        let ssq: f64 = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let r = phi_squared(x, &potential, &p).unwrap() - table.lambda(i + 1);
                r * r
            })
            .sum();
        assert!((ssq - 5.22186).abs() / 5.22186 < 0.05, "ssq = {ssq}");
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(FractalParams::new(1.0, 1.0, vec![0.0]).is_err());
        assert!(FractalParams::new(2.0, -0.1, vec![0.0]).is_err());
        assert!(FractalParams::new(2.0, 1.0, vec![1.4]).is_err());
        assert!(FractalParams::with_dimension(2.0, 1.0, 2.0, vec![0.0]).is_err());
    }

    #[test]
    fn truncation_tail_bound() {
        // adding term m+1 changes F by at most 4 / gamma^{(m+1)(2-D)}
        let table = [1.3, 2.7, 5.9];
        for &gamma in &[1.2, 1.41119, 2.18081, 3.0] {
            for &x in &table {
                for m in 5..15 {
                    let a = weierstrass_real(x, &params(gamma, 1.0, vec![0.07; m]));
                    let b = weierstrass_real(x, &params(gamma, 1.0, vec![0.07; m + 1]));
                    let bound = 4.0 * gamma.powf(-((m + 1) as f64) * 0.5);
                    assert!(
                        (b - a).abs() <= bound + 1e-12,
                        "tail bound violated: gamma={gamma} m={m}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn evenness(x in -20.0f64..20.0, gamma in 1.01f64..4.0, seed in 0u64..1000) {
            let mut phases = Vec::new();
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            for _ in 0..7 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                phases.push((s >> 11) as f64 / (1u64 << 53) as f64);
            }
            let p = params(gamma, 1.0, phases);
            let f_pos = weierstrass_real(x, &p);
            let f_neg = weierstrass_real(-x, &p);
            prop_assert!((f_pos - f_neg).abs() <= 1e-10 * f_pos.abs().max(1.0));
        }

        #[test]
        fn phi_squared_even(x in 0.01f64..10.0, gamma in 1.01f64..4.0) {
            let potential = SmoothPotential::with_defaults();
            let p = params(gamma, 1.7, vec![0.2, 0.5, 0.8]);
            let a = phi_squared(x, &potential, &p).unwrap();
            let b = phi_squared(-x, &potential, &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }

        #[test]
        fn mixed_quarter_phases_match_smooth(x in 0.01f64..10.0, mask in 0u8..=255) {
            // any mix of alpha in {1/4, 3/4} leaves only the smooth part
            let potential = SmoothPotential::with_defaults();
            let phases: Vec<f64> = (0..8)
                .map(|k| if mask & (1 << k) != 0 { 0.25 } else { 0.75 })
                .collect();
            let fractal = params(2.0, 2.5, phases);
            let smooth = params(2.0, 0.0, vec![0.0; 8]);
            let a = phi_squared(x, &potential, &fractal).unwrap();
            let b = phi_squared(x, &potential, &smooth).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}
