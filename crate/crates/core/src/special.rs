//! Scalar special functions: gamma via the Lanczos approximation and the
//! real-argument Riemann zeta function via Euler-Maclaurin summation.

use std::f64::consts::PI;

// Lanczos coefficients for g = 7, n = 9 (double precision).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (poles at 0, -1, -2, ... return NaN).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

// B_2, B_4, ..., B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta for real s > 1, by Euler-Maclaurin summation.
///
/// With `n_terms = 50` the result is accurate to full double precision for
/// s >= 2.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta: requires s > 1, got {s}");
    let n = 50usize;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 1..n {
        sum += (k as f64).powf(-s);
    }
    sum += 0.5 * nf.powf(-s);
    sum += nf.powf(1.0 - s) / (s - 1.0);
    // tail: sum_k B_2k/(2k)! * (s)_{2k-1} * n^{-s-2k+1}
    let mut rising = s; // (s)_1
    let mut fact = 2.0; // (2k)!
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (k + 1);
        sum += b / fact * rising * nf.powf(-s - two_k as f64 + 1.0);
        // update rising factorial (s)_{2k+1} and factorial (2k+2)!
        rising *= (s + two_k as f64 - 1.0) * (s + two_k as f64);
        fact *= ((two_k + 1) * (two_k + 2)) as f64;
    }
    sum
}

/// Root of t^3 = t^2 + t + 1 (the tribonacci constant), by Newton iteration.
pub fn tribonacci_constant() -> f64 {
    let mut t: f64 = 1.84;
    for _ in 0..60 {
        let f = t * t * t - t * t - t - 1.0;
        let df = 3.0 * t * t - 2.0 * t - 1.0;
        let next = t - f / df;
        if (next - t).abs() < 1e-16 {
            return next;
        }
        t = next;
    }
    t
}

/// Cahen's constant: the alternating sum of 1/(s_k - 1) over Sylvester's
/// sequence 2, 3, 7, 43, 1807, ... Convergence is doubly exponential.
pub fn cahen_constant() -> f64 {
    let mut s: f64 = 2.0;
    let mut sign = 1.0;
    let mut total = 0.0;
    for _ in 0..10 {
        let term = sign / (s - 1.0);
        total += term;
        if term.abs() < 1e-18 {
            break;
        }
        sign = -sign;
        s = s * s - s + 1.0;
    }
    total
}
