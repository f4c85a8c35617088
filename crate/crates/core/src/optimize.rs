//! Joint parameter estimation for the coupled level and quantization
//! equations, by seeded differential evolution (rand/1/bin with bounds
//! projection), plus deterministic replay and the iterative two-step
//! phase-fit / turning-point-adjustment scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cbc::{adjust_turning_point, cbc_integral, cbc_ratio_series, default_adjust_interval, CbcReport, QuadratureConfig};
use crate::error::{Error, Result};
use crate::fractal::{phi_squared, FractalParams};
use crate::potential::SmoothPotential;
use crate::zeros::ZeroTable;

use std::f64::consts::PI;

/// How the scaled phases enter the fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PhaseMode {
    /// m free phases within the configured bounds.
    Free,
    /// All phases pinned to zero.
    ZeroFixed,
    /// m free phases, decoded in non-decreasing order.
    Monotone,
    /// Phases pinned to the given scaled values.
    FixedValues(Vec<f64>),
}

/// Whether the fractal scale is a fit parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SigmaMode {
    /// sigma = 1, the unscaled model.
    Fixed1,
    /// sigma free within [lo, hi].
    Free { lo: f64, hi: f64 },
}

impl SigmaMode {
    pub fn free_default() -> Self {
        SigmaMode::Free { lo: 0.1, hi: 10.0 }
    }
}

/// How the turning points enter the fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum XMode {
    /// Turning points of the smooth potential at the fitted levels.
    FixedSmooth,
    /// Turning points pinned to the given values.
    FixedValues(Vec<f64>),
    /// Free, strictly increasing by construction: x_1 = d_1,
    /// x_j = x_{j-1} + d_j with increments in `delta_bounds`.
    FreeIncreasing,
}

/// Configuration of one fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitProblem {
    /// Number of levels fitted.
    pub n: usize,
    /// Number of phases (truncation order).
    pub m: usize,
    pub zeros: ZeroTable,
    pub phase_mode: PhaseMode,
    /// Bounds of the scaled phases (default [0, 1]).
    pub phase_bounds: (f64, f64),
    /// gamma is a fit parameter unless the bounds are degenerate.
    pub gamma_bounds: (f64, f64),
    pub sigma_mode: SigmaMode,
    pub x_mode: XMode,
    /// Bounds of the turning-point increments in `FreeIncreasing` mode.
    pub delta_bounds: (f64, f64),
    /// (w_susy, w_cbc) objective weights.
    pub weights: (f64, f64),
    /// Fractal dimension.
    pub d: f64,
    pub seed: u64,
    /// Population size (default 15 x dimension, minimum 4 x dimension).
    pub population: Option<usize>,
    pub generations: usize,
    /// Differential weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub quad: QuadratureConfig,
}

impl FitProblem {
    pub fn new(n: usize, m: usize, zeros: ZeroTable, seed: u64) -> Result<Self> {
        let problem = Self {
            n,
            m,
            zeros,
            phase_mode: PhaseMode::Free,
            phase_bounds: (0.0, 1.0),
            gamma_bounds: (1.0, 5.0),
            sigma_mode: SigmaMode::Fixed1,
            x_mode: XMode::FixedSmooth,
            delta_bounds: (1e-3, 2.0),
            weights: (1.0, 1.0),
            d: 1.5,
            seed,
            population: None,
            generations: 500,
            f: 0.7,
            cr: 0.9,
            quad: QuadratureConfig::default(),
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > self.zeros.len() {
            return Err(Error::InvalidArgument(format!(
                "n = {} must lie in 1..={}",
                self.n,
                self.zeros.len()
            )));
        }
        if self.gamma_bounds.0 < 1.0 || self.gamma_bounds.1 < self.gamma_bounds.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma bounds {:?} must satisfy 1 <= lo <= hi",
                self.gamma_bounds
            )));
        }
        if self.weights.0 < 0.0 || self.weights.1 < 0.0 || self.weights == (0.0, 0.0) {
            return Err(Error::InvalidArgument(
                "objective weights must be nonnegative and not both zero".to_string(),
            ));
        }
        if let SigmaMode::Free { lo, hi } = self.sigma_mode {
            if !(lo >= 0.0 && hi > lo) {
                return Err(Error::InvalidArgument(format!(
                    "sigma bounds [{lo}, {hi}] invalid"
                )));
            }
        }
        if let PhaseMode::FixedValues(v) = &self.phase_mode {
            if v.len() != self.m {
                return Err(Error::DimensionMismatch(format!(
                    "{} fixed phases vs m = {}",
                    v.len(),
                    self.m
                )));
            }
        }
        if let XMode::FixedValues(v) = &self.x_mode {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch(format!(
                    "{} fixed turning points vs n = {}",
                    v.len(),
                    self.n
                )));
            }
        }
        self.quad.validate()?;
        Ok(())
    }

    fn gamma_is_free(&self) -> bool {
        self.gamma_bounds.1 > self.gamma_bounds.0
    }

    fn phases_are_free(&self) -> bool {
        matches!(self.phase_mode, PhaseMode::Free | PhaseMode::Monotone)
    }

    fn x_is_free(&self) -> bool {
        matches!(self.x_mode, XMode::FreeIncreasing)
    }

    /// Number of genes in the candidate vector.
    pub fn dimension(&self) -> usize {
        let mut dim = 0;
        if self.phases_are_free() {
            dim += self.m;
        }
        if self.x_is_free() {
            dim += self.n;
        }
        if self.gamma_is_free() {
            dim += 1;
        }
        if matches!(self.sigma_mode, SigmaMode::Free { .. }) {
            dim += 1;
        }
        dim
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let mut bounds = Vec::with_capacity(self.dimension());
        if self.phases_are_free() {
            bounds.extend(std::iter::repeat(self.phase_bounds).take(self.m));
        }
        if self.x_is_free() {
            bounds.extend(std::iter::repeat(self.delta_bounds).take(self.n));
        }
        if self.gamma_is_free() {
            bounds.push(self.gamma_bounds);
        }
        if let SigmaMode::Free { lo, hi } = self.sigma_mode {
            bounds.push((lo, hi));
        }
        bounds
    }

    /// Decode a candidate vector into fractal parameters and turning points.
    pub fn decode(&self, candidate: &[f64], potential: &SmoothPotential) -> Result<(FractalParams, Vec<f64>)> {
        if candidate.len() != self.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "candidate has {} genes, problem dimension is {}",
                candidate.len(),
                self.dimension()
            )));
        }
        let mut cursor = 0usize;
        let phases = match &self.phase_mode {
            PhaseMode::Free => {
                cursor += self.m;
                candidate[..self.m].to_vec()
            }
            PhaseMode::Monotone => {
                cursor += self.m;
                let mut v = candidate[..self.m].to_vec();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
            PhaseMode::ZeroFixed => vec![0.0; self.m],
            PhaseMode::FixedValues(v) => v.clone(),
        };
        let xs = match &self.x_mode {
            XMode::FixedSmooth => potential.turning_points(&self.zeros, self.n)?,
            XMode::FixedValues(v) => v.clone(),
            XMode::FreeIncreasing => {
                let deltas = &candidate[cursor..cursor + self.n];
                cursor += self.n;
                let mut xs = Vec::with_capacity(self.n);
                let mut acc = 0.0;
                for d in deltas {
                    acc += d;
                    xs.push(acc);
                }
                xs
            }
        };
        let gamma = if self.gamma_is_free() {
            let g = candidate[cursor];
            cursor += 1;
            g
        } else {
            self.gamma_bounds.0
        };
        let sigma = match self.sigma_mode {
            SigmaMode::Fixed1 => 1.0,
            SigmaMode::Free { .. } => candidate[cursor],
        };
        let params = FractalParams::with_dimension(gamma.max(1.0 + 1e-12), sigma, self.d, phases)?;
        Ok((params, xs))
    }
}

/// Objective components of one candidate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ObjectiveValue {
    pub ssq_susy: f64,
    pub ssq_cbc: f64,
    pub total: f64,
}

/// Outcome of a fit or replay.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct FitResult {
    pub params: FractalParams,
    pub x: Vec<f64>,
    pub ssq_susy: f64,
    pub ssq_cbc: f64,
    pub ssq_total: f64,
    pub cbc: CbcReport,
    /// Best total objective after each generation (empty for replays).
    pub history: Vec<f64>,
    pub seed: u64,
}

fn evaluate_decoded(
    params: &FractalParams,
    xs: &[f64],
    problem: &FitProblem,
    potential: &SmoothPotential,
    skip_cbc: bool,
) -> Result<ObjectiveValue> {
    let lambdas = &problem.zeros.values()[..problem.n];
    let mut ssq_susy = 0.0;
    for (&x, &lambda) in xs.iter().zip(lambdas) {
        let r = phi_squared(x, potential, params)? - lambda;
        ssq_susy += r * r;
    }
    let ssq_cbc = if skip_cbc {
        0.0
    } else {
        let mut acc = 0.0;
        for (idx, (&x, &lambda)) in xs.iter().zip(lambdas).enumerate() {
            let i = cbc_integral(lambda, x, |t| phi_squared(t, potential, params), &problem.quad)?
                .value;
            let r = i - (idx + 1) as f64 * PI;
            acc += r * r;
        }
        acc
    };
    Ok(ObjectiveValue {
        ssq_susy,
        ssq_cbc,
        total: problem.weights.0 * ssq_susy + problem.weights.1 * ssq_cbc,
    })
}

/// Evaluate the weighted objective at an encoded candidate.
pub fn objective(
    candidate: &[f64],
    problem: &FitProblem,
    potential: &SmoothPotential,
) -> Result<ObjectiveValue> {
    problem.validate()?;
    for (gene, (lo, hi)) in candidate.iter().zip(problem.bounds()) {
        if !(lo..=hi).contains(gene) {
            return Err(Error::InvalidArgument(format!(
                "gene {gene} outside bounds [{lo}, {hi}]"
            )));
        }
    }
    let (params, xs) = problem.decode(candidate, potential)?;
    evaluate_decoded(&params, &xs, problem, potential, false)
}

/// Deterministic re-evaluation of a parameter set: no optimization, full
/// diagnostics.
pub fn replay(
    params: &FractalParams,
    xs: &[f64],
    problem: &FitProblem,
    potential: &SmoothPotential,
) -> Result<FitResult> {
    problem.validate()?;
    if xs.len() != problem.n || params.m() != problem.m {
        return Err(Error::DimensionMismatch(format!(
            "replay with {} turning points / {} phases vs problem n = {}, m = {}",
            xs.len(),
            params.m(),
            problem.n,
            problem.m
        )));
    }
    let value = evaluate_decoded(params, xs, problem, potential, false)?;
    let cbc = cbc_ratio_series(
        &problem.zeros.take(problem.n)?,
        xs,
        potential,
        params,
        &problem.quad,
    )?;
    Ok(FitResult {
        params: params.clone(),
        x: xs.to_vec(),
        ssq_susy: value.ssq_susy,
        ssq_cbc: value.ssq_cbc,
        ssq_total: value.total,
        cbc,
        history: vec![value.total],
        seed: problem.seed,
    })
}

/// Bounded global minimization by differential evolution (rand/1/bin).
///
/// Deterministic for a fixed seed: all random draws happen on a single
/// sequential stream; candidate evaluations are pure and may run in
/// parallel without affecting the result.
pub fn differential_evolution(
    problem: &FitProblem,
    potential: &SmoothPotential,
) -> Result<FitResult> {
    problem.validate()?;
    let dim = problem.dimension();
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "problem has no free parameters".to_string(),
        ));
    }
    let bounds = problem.bounds();
    let np = problem.population.unwrap_or(15 * dim).max(4);
    if np < 4 * dim {
        return Err(Error::InvalidArgument(format!(
            "population {np} below the minimum 4 x dimension = {}",
            4 * dim
        )));
    }
    let skip_cbc = problem.weights.1 == 0.0;
    let fitness_of = |genes: &Vec<f64>| -> f64 {
        match problem
            .decode(genes, potential)
            .and_then(|(params, xs)| evaluate_decoded(&params, &xs, problem, potential, skip_cbc))
        {
            Ok(v) if v.total.is_finite() => v.total,
            _ => f64::INFINITY,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect()
        })
        .collect();
    let mut fitness: Vec<f64> = population.par_iter().map(fitness_of).collect();
    if fitness.iter().all(|f| !f.is_finite()) {
        return Err(Error::Optimization(
            "all initial candidates failed to evaluate".to_string(),
        ));
    }

    let mut history = Vec::with_capacity(problem.generations + 1);
    let best_now = |fitness: &[f64]| -> f64 {
        fitness.iter().copied().fold(f64::INFINITY, f64::min)
    };
    history.push(best_now(&fitness));

    let mut trials: Vec<Vec<f64>> = vec![vec![0.0; dim]; np];
    for _gen in 0..problem.generations {
        for i in 0..np {
            let mut pick = || loop {
                let r = rng.gen_range(0..np);
                if r != i {
                    return r;
                }
            };
            let (r1, mut r2, mut r3) = (pick(), pick(), pick());
            while r2 == r1 {
                r2 = pick();
            }
            while r3 == r1 || r3 == r2 {
                r3 = pick();
            }
            let j_rand = rng.gen_range(0..dim);
            let trial = &mut trials[i];
            for j in 0..dim {
                let cross = rng.gen::<f64>() < problem.cr || j == j_rand;
                trial[j] = if cross {
                    let v = population[r1][j]
                        + problem.f * (population[r2][j] - population[r3][j]);
                    v.clamp(bounds[j].0, bounds[j].1)
                } else {
                    population[i][j]
                };
            }
        }
        let trial_fitness: Vec<f64> = trials.par_iter().map(fitness_of).collect();
        for i in 0..np {
            if trial_fitness[i] <= fitness[i] {
                std::mem::swap(&mut population[i], &mut trials[i]);
                fitness[i] = trial_fitness[i];
            }
        }
        history.push(best_now(&fitness));
    }

    let best = fitness
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if !fitness[best].is_finite() {
        return Err(Error::Optimization(
            "no finite-fitness candidate after evolution".to_string(),
        ));
    }
    let (params, xs) = problem.decode(&population[best], potential)?;
    let value = evaluate_decoded(&params, &xs, problem, potential, skip_cbc)?;
    let cbc = cbc_ratio_series(
        &problem.zeros.take(problem.n)?,
        &xs,
        potential,
        &params,
        &problem.quad,
    )?;
    Ok(FitResult {
        params,
        x: xs,
        ssq_susy: value.ssq_susy,
        ssq_cbc: value.ssq_cbc,
        ssq_total: value.total,
        cbc,
        history,
        seed: problem.seed,
    })
}

/// Fit phases only, at fixed smooth turning points and fixed gamma,
/// minimizing the level-equation sum of squares (m must equal n).
pub fn fit_phases_fixed_x(problem: &FitProblem, potential: &SmoothPotential) -> Result<FitResult> {
    if problem.m != problem.n {
        return Err(Error::InvalidArgument(format!(
            "phase fit requires m = n, got m = {}, n = {}",
            problem.m, problem.n
        )));
    }
    if problem.gamma_is_free() {
        return Err(Error::InvalidArgument(
            "phase fit requires fixed gamma (degenerate bounds)".to_string(),
        ));
    }
    if !matches!(problem.x_mode, XMode::FixedSmooth | XMode::FixedValues(_)) {
        return Err(Error::InvalidArgument(
            "phase fit requires fixed turning points".to_string(),
        ));
    }
    let mut sub = problem.clone();
    sub.weights = (1.0, 0.0);
    differential_evolution(&sub, potential)
}

/// One iteration of the two-step scheme.
#[derive(Debug, Clone, Serialize)]
pub struct TwoStepIteration {
    /// Step (a): phase fit at the current turning points.
    pub phase_fit: FitResult,
    /// Step (b): per-level turning points adjusted toward unit CBC ratio.
    pub adjusted_x: Vec<f64>,
    pub adjusted_ratios: Vec<f64>,
    /// Level-equation sum of squares at the fitted phases and adjusted
    /// turning points.
    pub ssq_susy_after_adjust: f64,
}

/// Alternate (a) phase fitting at the current turning points with (b)
/// per-level turning-point adjustment at the current phases. Stops early
/// when neither phases nor turning points move by more than 1e-6.
pub fn iterate_two_step(
    problem: &FitProblem,
    iterations: usize,
    potential: &SmoothPotential,
) -> Result<Vec<TwoStepIteration>> {
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".to_string(),
        ));
    }
    if problem.gamma_is_free() {
        return Err(Error::InvalidArgument(
            "two-step iteration requires fixed gamma".to_string(),
        ));
    }
    let mut x_current = potential.turning_points(&problem.zeros, problem.n)?;
    let mut prev_phases: Option<Vec<f64>> = None;
    let mut records = Vec::new();
    for iter in 0..iterations {
        let mut sub = problem.clone();
        sub.x_mode = XMode::FixedValues(x_current.clone());
        sub.weights = (1.0, 0.0);
        sub.seed = problem.seed.wrapping_add(iter as u64);
        let phase_fit = differential_evolution(&sub, potential)?;

        let params = phase_fit.params.clone();
        let lambdas = &problem.zeros.values()[..problem.n];
        let mut adjusted_x = Vec::with_capacity(problem.n);
        let mut adjusted_ratios = Vec::with_capacity(problem.n);
        for (idx, (&lambda, &x_old)) in lambdas.iter().zip(&x_current).enumerate() {
            let (x_adj, ratio) = adjust_turning_point(
                idx + 1,
                lambda,
                |t| phi_squared(t, potential, &params),
                &problem.quad,
                default_adjust_interval(x_old),
            )?;
            adjusted_x.push(x_adj);
            adjusted_ratios.push(ratio);
        }
        let after = evaluate_decoded(&params, &adjusted_x, problem, potential, true)?;
        let dx: f64 = adjusted_x
            .iter()
            .zip(&x_current)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let dphase = prev_phases
            .as_ref()
            .map(|prev| {
                params
                    .phases
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY);
        prev_phases = Some(params.phases.clone());
        x_current = adjusted_x.clone();
        records.push(TwoStepIteration {
            phase_fit,
            adjusted_x,
            adjusted_ratios,
            ssq_susy_after_adjust: after.ssq_susy,
        });
        if dx < 1e-6 && dphase < 1e-6 {
            break;
        }
    }
    Ok(records)
}
