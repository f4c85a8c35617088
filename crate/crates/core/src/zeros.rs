//! Acquisition of the imaginary parts of the nontrivial Riemann zeros:
//! ingestion from a reference table, or computation from the Riemann-Siegel
//! Z function with bisection refinement.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

const REFERENCE_TABLE: &str = include_str!("../data/zeros.txt");

/// Where a [`ZeroTable`]'s values came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Computed,
    Ingested,
}

/// Ordered imaginary parts of the nontrivial Riemann zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTable {
    values: Vec<f64>,
    source: ZeroSource,
}

impl ZeroTable {
    /// Build a table, validating strict monotonicity and the first-zero
    /// bracket 14 < lambda_1 < 14.2 (empty tables are valid).
    pub fn new(values: Vec<f64>, source: ZeroSource) -> Result<Self> {
        for (i, pair) in values.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::NonMonotone {
                    index: i + 1,
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        if let Some(&first) = values.first() {
            if !(14.0..14.2).contains(&first) {
                return Err(Error::FirstZeroBracket { value: first });
            }
        }
        Ok(Self { values, source })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> ZeroSource {
        self.source
    }

    /// 1-based accessor: `lambda(1)` is the first zero.
    pub fn lambda(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.values.len(), "zero index {j} out of range");
        self.values[j - 1]
    }

    /// Prefix sub-table holding the first `n` zeros.
    pub fn take(&self, n: usize) -> Result<Self> {
        if n > self.values.len() {
            return Err(Error::TooFewZeros {
                requested: n,
                available: self.values.len(),
            });
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
            source: self.source,
        })
    }

    /// Canonical text serialization: one value per line, 13 decimal places.
    /// Ingesting a canonical file and re-serializing is byte-identical.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&format!("{v:.13}\n"));
        }
        out
    }

    /// The reference table shipped with the crate (first 300 zeros).
    pub fn reference() -> &'static ZeroTable {
        static TABLE: OnceLock<ZeroTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            parse_table(REFERENCE_TABLE, Path::new("<builtin>"), None)
                .expect("builtin zero table is valid")
        })
    }
}

/// Read the first `count` zeros from a text file (one decimal per line,
/// `#` comments and blank lines ignored).
pub fn ingest_zeros(path: &Path, count: usize) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, path, Some(count))
}

fn parse_table(text: &str, path: &Path, count: Option<usize>) -> Result<ZeroTable> {
    if count == Some(0) {
        return ZeroTable::new(Vec::new(), ZeroSource::Ingested);
    }
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            text: trimmed.to_string(),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                text: trimmed.to_string(),
            });
        }
        values.push(value);
        if let Some(n) = count {
            if values.len() == n {
                break;
            }
        }
    }
    if let Some(n) = count {
        if values.len() < n {
            return Err(Error::TooFewZeros {
                requested: n,
                available: values.len(),
            });
        }
    }
    ZeroTable::new(values, ZeroSource::Ingested)
}

// ---------------------------------------------------------------------------
// Riemann-Siegel evaluation
// ---------------------------------------------------------------------------

/// Riemann-Siegel theta, asymptotic expansion (error < 1e-9 for t >= 10).
fn rs_theta(t: f64) -> f64 {
    t / 2.0 * (t / TAU).ln() - t / 2.0 - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
        + 31.0 / (80640.0 * t.powi(5))
}

/// Z(t) by the Riemann-Siegel formula: main sum over n <= sqrt(t/2pi) plus
/// remainder corrections C0..C3. Absolute accuracy is about 1e-4 near t = 15
/// and improves rapidly with t.
pub fn riemann_siegel_z(t: f64) -> Result<f64> {
    if t < 10.0 {
        return Err(Error::OutOfRange {
            quantity: "t",
            value: t,
            detail: "Riemann-Siegel evaluation requires t >= 10".to_string(),
        });
    }
    let a = (t / TAU).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let theta = rs_theta(t);

    let mut sum = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        sum += (theta - t * kf.ln()).cos() / kf.sqrt();
    }
    sum *= 2.0;

    let c = remainder_coefficients(p);
    let tau = 1.0 / a; // (t/2pi)^{-1/2}
    let series = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sum + sign * series / a.sqrt())
}

/// High-accuracy Z(t) via Euler-Maclaurin summation of zeta(1/2 + it),
/// used to refine roots located by the Riemann-Siegel scan. Accurate to
/// roughly 1e-11 for 10 <= t <= 1000.
pub fn z_accurate(t: f64) -> Result<f64> {
    if t < 10.0 {
        return Err(Error::OutOfRange {
            quantity: "t",
            value: t,
            detail: "Z evaluation requires t >= 10".to_string(),
        });
    }
    let zeta = zeta_half_line(t);
    let theta = rs_theta(t);
    // Z = Re( e^{i theta} zeta(1/2 + it) )
    Ok(theta.cos() * zeta.re - theta.sin() * zeta.im)
}

#[derive(Clone, Copy)]
struct Cplx {
    re: f64,
    im: f64,
}

impl Cplx {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn add(self, o: Cplx) -> Cplx {
        Cplx::new(self.re + o.re, self.im + o.im)
    }
    fn mul(self, o: Cplx) -> Cplx {
        Cplx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
    fn scale(self, s: f64) -> Cplx {
        Cplx::new(self.re * s, self.im * s)
    }
    fn div(self, o: Cplx) -> Cplx {
        let d = o.re * o.re + o.im * o.im;
        Cplx::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// n^{-s} for s = sigma + it.
fn pow_neg_s(n: f64, sigma: f64, t: f64) -> Cplx {
    let ln_n = n.ln();
    let mag = (-sigma * ln_n).exp();
    let phase = -t * ln_n;
    Cplx::new(mag * phase.cos(), mag * phase.sin())
}

const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// zeta(1/2 + it) by Euler-Maclaurin with N ~ t terms.
fn zeta_half_line(t: f64) -> Cplx {
    let sigma = 0.5;
    let n = (8.0 + 0.9 * t).ceil() as usize;
    let nf = n as f64;
    let s = Cplx::new(sigma, t);

    let mut sum = Cplx::new(0.0, 0.0);
    for k in 1..n {
        sum = sum.add(pow_neg_s(k as f64, sigma, t));
    }
    let n_pow = pow_neg_s(nf, sigma, t);
    sum = sum.add(n_pow.scale(0.5));
    // N^{1-s}/(s-1)
    let n_pow1 = n_pow.scale(nf);
    sum = sum.add(n_pow1.div(Cplx::new(sigma - 1.0, t)));
    // tail corrections: B_2k/(2k)! * (s)_{2k-1} * N^{-s-2k+1}
    let mut rising = s; // (s)_1
    let mut fact = 2.0; // (2k)!
    let mut n_shift = n_pow.scale(1.0 / nf); // N^{-s-1}
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let two_k = (2 * (k + 1)) as f64;
        sum = sum.add(rising.mul(n_shift).scale(b / fact));
        rising = rising
            .mul(Cplx::new(sigma + two_k - 1.0, t))
            .mul(Cplx::new(sigma + two_k, t));
        fact *= (two_k + 1.0) * (two_k + 2.0);
        n_shift = n_shift.scale(1.0 / (nf * nf));
    }
    sum
}

// ---------------------------------------------------------------------------
// Remainder coefficients C0..C3 via truncated Taylor (jet) arithmetic
// ---------------------------------------------------------------------------

const JET_LEN: usize = 24;

/// Truncated Taylor series of order JET_LEN-1 at an expansion point.
#[derive(Clone, Copy)]
struct Jet {
    c: [f64; JET_LEN],
}

impl Jet {
    fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x0`.
    fn var(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    fn scale(mut self, s: f64) -> Self {
        for v in &mut self.c {
            *v *= s;
        }
        self
    }

    fn add(mut self, o: &Jet) -> Self {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        self
    }

    fn mul(&self, o: &Jet) -> Self {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            for j in 0..JET_LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    /// cos of a jet, via the coupled sine/cosine recurrence.
    fn cos(&self) -> Self {
        let mut cos_c = [0.0; JET_LEN];
        let mut sin_c = [0.0; JET_LEN];
        cos_c[0] = self.c[0].cos();
        sin_c[0] = self.c[0].sin();
        for k in 1..JET_LEN {
            let mut dc = 0.0;
            let mut ds = 0.0;
            for j in 1..=k {
                dc -= j as f64 * self.c[j] * sin_c[k - j];
                ds += j as f64 * self.c[j] * cos_c[k - j];
            }
            cos_c[k] = dc / k as f64;
            sin_c[k] = ds / k as f64;
        }
        Jet { c: cos_c }
    }

    /// Series division, requires a nonzero constant term in `den`.
    fn div(&self, den: &Jet) -> Self {
        let mut q = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= q[j] * den.c[k - j];
            }
            q[k] = acc / den.c[0];
        }
        Jet { c: q }
    }

    /// Re-center the polynomial from its expansion point to `x0 + d`.
    fn shift(&self, d: f64) -> Self {
        // out[j] = sum_{k>=j} c[k] * C(k,j) * d^{k-j}
        let mut binom = [[0.0f64; JET_LEN]; JET_LEN];
        for k in 0..JET_LEN {
            binom[k][0] = 1.0;
            for j in 1..=k {
                binom[k][j] = binom[k - 1][j - 1] + if j <= k - 1 { binom[k - 1][j] } else { 0.0 };
            }
        }
        let mut out = [0.0; JET_LEN];
        for (j, o) in out.iter_mut().enumerate() {
            let mut pow = 1.0;
            for k in j..JET_LEN {
                *o += self.c[k] * binom[k][j] * pow;
                pow *= d;
            }
        }
        Jet { c: out }
    }

    /// k-th derivative at the expansion point.
    fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }
}

/// Taylor jet of Psi(p) = cos(2pi(p^2 - p - 1/16)) / cos(2pi p) at `p`.
///
/// The denominator vanishes at p = 1/4 and 3/4 but the singularity is
/// removable; near those points the quotient is formed at the singular point
/// (where both series start at order one) and re-centered.
fn psi_jet(p: f64) -> Jet {
    let near = [0.25f64, 0.75]
        .iter()
        .copied()
        .find(|ps| (p - ps).abs() < 0.05);
    let base = near.unwrap_or(p);

    let pj = Jet::var(base);
    let num_arg = pj
        .mul(&pj)
        .add(&pj.scale(-1.0))
        .add(&Jet::constant(-1.0 / 16.0))
        .scale(TAU);
    let den_arg = pj.scale(TAU);
    let mut num = num_arg.cos();
    let mut den = den_arg.cos();

    match near {
        None => num.div(&den),
        Some(ps) => {
            // both series vanish at the base point; cancel one power
            num.c.rotate_left(1);
            num.c[JET_LEN - 1] = 0.0;
            den.c.rotate_left(1);
            den.c[JET_LEN - 1] = 0.0;
            num.div(&den).shift(p - ps)
        }
    }
}

/// Remainder coefficients [C0, C1, C2, C3] of the Riemann-Siegel formula at
/// fractional part `p`, expressed through derivatives of Psi.
fn remainder_coefficients(p: f64) -> [f64; 4] {
    let psi = psi_jet(p);
    let pi2 = PI * PI;
    let c0 = psi.derivative(0);
    let c1 = -psi.derivative(3) / (96.0 * pi2);
    let c2 = psi.derivative(2) / (64.0 * pi2) + psi.derivative(6) / (18432.0 * pi2 * pi2);
    let c3 = -psi.derivative(1) / (64.0 * pi2)
        - psi.derivative(5) / (3840.0 * pi2 * pi2)
        - psi.derivative(9) / (5_308_416.0 * pi2 * pi2 * pi2);
    [c0, c1, c2, c3]
}

// ---------------------------------------------------------------------------
// Zero computation
// ---------------------------------------------------------------------------

const SCAN_START: f64 = 10.0;
const BISECT_TOL: f64 = 1e-9;

/// Upper scan bound from the Riemann-von Mangoldt counting estimate
/// N(T) ~ (T/2pi) ln(T/(2pi e)) + 7/8, padded for safety.
fn scan_limit(count: usize) -> f64 {
    let target = count as f64 + 5.0;
    let mut t: f64 = 30.0;
    for _ in 0..200 {
        let n_est = t / TAU * (t / (TAU * std::f64::consts::E)).ln() + 7.0 / 8.0;
        if n_est >= target {
            break;
        }
        t *= 1.2;
    }
    t * 1.15
}

/// Find the first `count` zeros by scanning the Riemann-Siegel Z for sign
/// changes on a grid and bisecting each bracket (refined with the
/// Euler-Maclaurin evaluation) to 1e-9.
pub fn compute_zeros(count: usize, grid_step: f64) -> Result<ZeroTable> {
    if count < 1 {
        return Err(Error::InvalidArgument(
            "compute_zeros: count must be at least 1".to_string(),
        ));
    }
    if !(grid_step > 0.0 && grid_step <= 0.25) {
        return Err(Error::OutOfRange {
            quantity: "grid_step",
            value: grid_step,
            detail: "grid step must lie in (0, 0.25] to avoid skipped sign changes".to_string(),
        });
    }
    let t_max = scan_limit(count);
    let mut roots = Vec::with_capacity(count);
    let mut t = SCAN_START;
    let mut z_prev = riemann_siegel_z(t)?;
    while roots.len() < count && t < t_max {
        let t_next = t + grid_step;
        let z_next = riemann_siegel_z(t_next)?;
        if z_prev == 0.0 {
            roots.push(t);
        } else if z_prev * z_next < 0.0 {
            roots.push(bisect_zero(t, t_next, grid_step)?);
        }
        t = t_next;
        z_prev = z_next;
    }
    if roots.len() < count {
        return Err(Error::ScanExhausted {
            found: roots.len(),
            t_max,
        });
    }
    ZeroTable::new(roots, ZeroSource::Computed)
}

fn bisect_zero(mut a: f64, mut b: f64, grid_step: f64) -> Result<f64> {
    let mut fa = z_accurate(a)?;
    let fb = z_accurate(b)?;
    // The scan bracket came from the Riemann-Siegel approximation; in the
    // rare case the accurate evaluation disagrees at an endpoint, widen once.
    if fa * fb > 0.0 {
        let a2 = (a - 0.5 * grid_step).max(SCAN_START);
        let b2 = b + 0.5 * grid_step;
        let fa2 = z_accurate(a2)?;
        let fb2 = z_accurate(b2)?;
        if fa2 * fb <= 0.0 {
            a = a2;
            fa = fa2;
        } else if fa * fb2 <= 0.0 {
            b = b2;
        } else {
            a = a2;
            fa = fa2;
            b = b2;
        }
    }
    while b - a > BISECT_TOL {
        let mid = 0.5 * (a + b);
        let fm = z_accurate(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    fn write_temp(content: &str) -> std::path::PathBuf {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let mut path = std::env::temp_dir();
        path.push(format!(
            "susyzeta-zeros-{}-{}.txt",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::SeqCst)
        ));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn ingest_basic() {
        let path = write_temp("14.134725\n21.022040\n");
        let table = ingest_zeros(&path, 2).unwrap();
        assert_eq!(table.values(), &[14.134725, 21.022040]);
        assert_eq!(table.source(), ZeroSource::Ingested);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn ingest_count_zero_is_empty() {
        let path = write_temp("14.134725\n");
        let table = ingest_zeros(&path, 0).unwrap();
        assert!(table.is_empty());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn ingest_rejects_non_monotone() {
        let path = write_temp("21.0\n14.1\n");
        let err = ingest_zeros(&path, 2).unwrap_err();
        assert!(matches!(err, Error::FirstZeroBracket { .. } | Error::NonMonotone { .. }));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn ingest_reports_parse_line() {
        let path = write_temp("14.134725\nnot-a-number\n");
        match ingest_zeros(&path, 2).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn ingest_too_few_lines() {
        let path = write_temp("14.134725\n");
        assert!(matches!(
            ingest_zeros(&path, 5).unwrap_err(),
            Error::TooFewZeros { requested: 5, available: 1 }
        ));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn ingest_skips_comments_and_blanks() {
        let path = write_temp("# header\n\n14.134725\n# middle\n21.022040\n");
        let table = ingest_zeros(&path, 2).unwrap();
        assert_eq!(table.len(), 2);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn reference_table_round_trips_canonically() {
        let table = ZeroTable::reference();
        assert_eq!(table.len(), 300);
        assert_eq!(table.to_canonical_string(), REFERENCE_TABLE);
    }

    #[test]
    fn remainder_coefficients_match_oracle() {
        // frozen from 40-digit numerical differentiation of Psi; the two rows
        // at p = 1/4 and 3/4 come from series division at the removable
        // singularity.
        let oracle = [
            (0.0, 0.92387953251128676, -0.030597306499706265, 0.001268874164589105, -0.00019868520940530243),
            (0.1, 0.71074557894489214, 0.00028806199604200523, 0.0021931407765795034, -0.00010610662502925851),
            (0.24, 0.51024838733921815, 0.010456173443690102, 0.0045155677232341998, 0.00024097378239221864),
            (0.25, 0.5, 0.010416666666666667, 0.0046127894006741231, 0.00025895858941170495),
            (0.26, 0.49024509840839559, 0.010317775941060645, 0.0047001716395619294, 0.00027470991601519241),
            (0.3, 0.45596596466348191, 0.0094384217493118763, 0.0049604353850132403, 0.00031331609952710177),
            (0.49988, 0.38268345755014117, 6.438024440249827e-6, 0.0051885428481183632, 3.2153181001266475e-7),
            (0.5, 0.38268343236508977, 0.0, 0.0051885428302931685, 0.0),
            (0.62, 0.40830492670794813, -0.0062163710232098923, 0.0051692422708767718, -0.00027093240573784544),
            (0.7, 0.45596596466348186, -0.0094384217493118746, 0.0049604353850132405, -0.0003133160995271018),
            (0.74, 0.49024509840839559, -0.010317775941060645, 0.0047001716395619294, -0.00027470991601519241),
            (0.75, 0.5, -0.010416666666666667, 0.0046127894006741231, -0.00025895858941170495),
            (0.76, 0.51024838733921815, -0.010456173443690102, 0.0045155677232341998, -0.00024097378239221864),
            (0.9, 0.71074557894489219, -0.00028806199604200024, 0.0021931407765795029, 0.00010610662502925856),
            (0.999, 0.92147747087619298, 0.03013712316319557, 0.0012580085497320813, 0.00019806389985758565),
        ];
        for (p, c0, c1, c2, c3) in oracle {
            let c = remainder_coefficients(p);
            assert_abs_diff_eq!(c[0], c0, epsilon = 1e-9);
            assert_abs_diff_eq!(c[1], c1, epsilon = 1e-9);
            assert_abs_diff_eq!(c[2], c2, epsilon = 1e-8);
            assert_abs_diff_eq!(c[3], c3, epsilon = 1e-8);
        }
    }

    #[test]
    fn z_vanishes_at_first_zero() {
        let lambda1 = ZeroTable::reference().lambda(1);
        assert!(riemann_siegel_z(lambda1).unwrap().abs() < 1e-3);
        assert!(z_accurate(lambda1).unwrap().abs() < 1e-9);
    }

    #[test]
    fn z_sign_change_brackets_first_zero() {
        let za = riemann_siegel_z(14.0).unwrap();
        let zb = riemann_siegel_z(14.2).unwrap();
        assert!(za * zb < 0.0);
    }

    #[test]
    fn z_rejects_below_validity() {
        assert!(riemann_siegel_z(5.0).is_err());
        assert!(z_accurate(9.0).is_err());
    }

    #[test]
    fn z_magnitude_matches_eta_series_oracle() {
        // independent oracle: |zeta(1/2+it)| from the alternating Dirichlet
        // series eta(s) = sum (-1)^{n-1} n^{-s}, accelerated by repeated
        // averaging of partial sums, with zeta = eta / (1 - 2^{1-s}).
        fn abs_zeta_half(t: f64) -> f64 {
            let n_direct = 2000usize;
            let levels = 40usize;
            let mut partial = Vec::with_capacity(levels + 1);
            let mut sum_re = 0.0f64;
            let mut sum_im = 0.0f64;
            for n in 1..=(n_direct + levels) {
                let nf = n as f64;
                let mag = nf.powf(-0.5);
                let phase = -t * nf.ln();
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                sum_re += sign * mag * phase.cos();
                sum_im += sign * mag * phase.sin();
                if n > n_direct {
                    partial.push((sum_re, sum_im));
                }
            }
            // Euler transform: repeatedly average adjacent partial sums
            let mut row = partial;
            while row.len() > 1 {
                row = row
                    .windows(2)
                    .map(|w| (0.5 * (w[0].0 + w[1].0), 0.5 * (w[0].1 + w[1].1)))
                    .collect();
            }
            let (eta_re, eta_im) = row[0];
            // 1 - 2^{1-s} with s = 1/2 + it
            let mag = 2.0f64.powf(0.5) ; // 2^{1-sigma} = 2^{1/2}
            let phase = -t * 2.0f64.ln();
            let dre = 1.0 - mag * phase.cos();
            let dim = -mag * phase.sin();
            let denom = (dre * dre + dim * dim).sqrt();
            (eta_re * eta_re + eta_im * eta_im).sqrt() / denom
        }
        for t in [20.0, 30.0, 45.0] {
            let oracle = abs_zeta_half(t);
            let z = riemann_siegel_z(t).unwrap().abs();
            assert_abs_diff_eq!(z, oracle, epsilon = 1e-3);
            assert_abs_diff_eq!(z_accurate(t).unwrap().abs(), oracle, epsilon = 1e-6);
        }
    }

    #[test]
    fn compute_first_zero() {
        let table = compute_zeros(1, 0.1).unwrap();
        assert_abs_diff_eq!(table.lambda(1), 14.134725, epsilon = 1e-5);
        assert_eq!(table.source(), ZeroSource::Computed);
    }

    #[test]
    fn compute_second_zero() {
        let table = compute_zeros(2, 0.1).unwrap();
        assert_abs_diff_eq!(table.lambda(2), 21.022040, epsilon = 1e-5);
    }

    #[test]
    fn compute_first_ten_match_reference() {
        let reference = ZeroTable::reference();
        let table = compute_zeros(10, 0.1).unwrap();
        for j in 1..=10 {
            assert_abs_diff_eq!(table.lambda(j), reference.lambda(j), epsilon = 1e-5);
        }
    }

    #[test]
    fn computed_roots_satisfy_z_tolerance() {
        let table = compute_zeros(5, 0.1).unwrap();
        for &root in table.values() {
            assert!(z_accurate(root).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn compute_rejects_bad_arguments() {
        assert!(compute_zeros(0, 0.1).is_err());
        assert!(compute_zeros(1, 0.3).is_err());
        assert!(compute_zeros(1, 0.0).is_err());
    }
}

