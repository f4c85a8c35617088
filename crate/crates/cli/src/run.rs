//! Subcommand implementations: resolve configuration, run the pipeline
//! stage, write artifacts.

use std::path::{Path, PathBuf};

use susyzeta::format::format_g9;
use susyzeta::{
    adjust_turning_point, cbc_ratio_series, compute_zeros, default_adjust_interval,
    differential_evolution, fractal_identity_check, ingest_zeros, iterate_two_step,
    phase_shift_correlation, rao_spacing_statistic, replay, residual_series, uniform_theta_grid,
    weierstrass_real, wrap_angle, affine_weierstrass, FitProblem, FitResult,
    FractalParams, NamedConstants, PhaseMode, QuadratureConfig, SigmaMode, SmoothPotential,
    Substitution, XMode, ZeroTable,
};

use crate::args::*;
use crate::config::*;
use crate::CliError;

pub struct Invocation<'a> {
    pub file: &'a ConfigFile,
    pub outdir: PathBuf,
    pub label: String,
}

fn load_zeros(path: Option<&Path>, count: usize) -> Result<ZeroTable, CliError> {
    match path {
        None => {
            let reference = ZeroTable::reference();
            Ok(reference.take(count.min(reference.len()))?)
        }
        Some(p) => Ok(ingest_zeros(p, count)?),
    }
}

fn parse_substitution(s: &str) -> Result<Substitution, CliError> {
    match s {
        "power-sub" | "power_sub" => Ok(Substitution::PowerSub),
        "gauss-jacobi" | "gauss_jacobi" => Ok(Substitution::GaussJacobi),
        other => Err(CliError::validation(format!(
            "unknown substitution {other:?} (expected power-sub | gauss-jacobi)"
        ))),
    }
}

/// Scaled phases from --alpha / --alpha-physical / --m (priority order).
fn resolve_phases(
    alpha: Option<Vec<f64>>,
    alpha_physical: Option<Vec<f64>>,
    m: Option<usize>,
) -> Vec<f64> {
    if let Some(a) = alpha {
        a
    } else if let Some(p) = alpha_physical {
        FractalParams::scale_physical_phases(&p)
    } else {
        vec![0.0; m.unwrap_or(0)]
    }
}

fn angles_from_file(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            CliError::validation(format!("{}:{}: not a number: {t:?}", path.display(), i + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn run_zeros(inv: &Invocation, args: &ZerosArgs) -> Result<(), CliError> {
    let section = inv.file.section("zeros");
    let count = pick(args.count, section, "count", 100usize);
    let compute = args.compute || pick(None, section, "compute", false);
    let grid_step = pick(args.grid_step, section, "grid_step", 0.1f64);
    let table_path = pick_opt(args.table.clone(), section, "table");

    let resolved = table_of(vec![
        ("count", v_int(count)),
        ("compute", v_bool(compute)),
        ("grid_step", v_f64(grid_step)),
        (
            "table",
            v_str(table_path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<builtin>".into())),
        ),
    ]);
    let ctx = RunContext::create(&inv.outdir, "zeros", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = if compute {
        compute_zeros(count, grid_step)?
    } else {
        load_zeros(table_path.as_deref(), count)?
    };
    ctx.write_raw("zeros.txt", table.to_canonical_string().as_bytes())?;
    println!("{}", ctx.out_dir.join("zeros.txt").display());
    Ok(())
}

pub fn run_turning_points(inv: &Invocation, args: &TurningPointsArgs) -> Result<(), CliError> {
    let section = inv.file.section("turning-points");
    let n = pick(args.n, section, "n", 8usize);
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");

    let resolved = table_of(vec![
        ("n", v_int(n)),
        (
            "zeros",
            v_str(zeros_path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<builtin>".into())),
        ),
    ]);
    let ctx = RunContext::create(&inv.outdir, "turning-points", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = load_zeros(zeros_path.as_deref(), n)?;
    let potential = SmoothPotential::covering(table.lambda(n))?;
    let xs = potential.turning_points(&table, n)?;
    let mut csv = String::from("j,lambda,x\n");
    for (i, x) in xs.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            format_g9(table.lambda(i + 1)),
            format_g9(*x)
        ));
    }
    let path = ctx.write_csv("turning_points.csv", &csv)?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_weier(inv: &Invocation, args: &WeierArgs) -> Result<(), CliError> {
    let section = inv.file.section("weier");
    let gamma = pick(args.gamma, section, "gamma", 2.3f64);
    let alpha = pick_opt(args.alpha.clone(), section, "alpha");
    let alpha_physical = pick_opt(args.alpha_physical.clone(), section, "alpha_physical");
    let m = pick_opt(args.m, section, "m");
    let scale = pick(args.scale, section, "scale", 1.0f64);
    let offset = pick(args.offset, section, "offset", 0.0f64);
    let x_min = pick(args.x_min, section, "x_min", 0.0f64);
    let x_max = pick(args.x_max, section, "x_max", 16.0f64);
    let samples = pick(args.samples, section, "samples", 1001usize);

    let phases = resolve_phases(alpha, alpha_physical, m.or(Some(20)));
    if samples < 2 {
        return Err(CliError::validation("samples must be at least 2".into()));
    }
    if x_max <= x_min {
        return Err(CliError::validation("x_max must exceed x_min".into()));
    }

    let resolved = table_of(vec![
        ("gamma", v_f64(gamma)),
        ("alpha", v_list(&phases)),
        ("scale", v_f64(scale)),
        ("offset", v_f64(offset)),
        ("x_min", v_f64(x_min)),
        ("x_max", v_f64(x_max)),
        ("samples", v_int(samples)),
    ]);
    let ctx = RunContext::create(&inv.outdir, "weier", &inv.label, resolved)?;
    ctx.write_echo()?;

    let params = FractalParams::new(gamma, 1.0, phases)?;
    let mut csv = String::from("x,value\n");
    for i in 0..samples {
        let x = x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64;
        let value = if scale == 1.0 && offset == 0.0 {
            weierstrass_real(x, &params)
        } else {
            affine_weierstrass(x, &params, scale, offset)
        };
        csv.push_str(&format!("{},{}\n", format_g9(x), format_g9(value)));
    }
    let path = ctx.write_csv("weier.csv", &csv)?;
    println!("{}", path.display());
    Ok(())
}

struct ModelArgs {
    gamma: f64,
    sigma: f64,
    phases: Vec<f64>,
}

fn resolve_model(
    section: &toml::Table,
    gamma: Option<f64>,
    sigma: Option<f64>,
    alpha: Option<Vec<f64>>,
    alpha_physical: Option<Vec<f64>>,
) -> ModelArgs {
    let gamma = pick(gamma, section, "gamma", 2.0f64);
    let sigma = pick(sigma, section, "sigma", 0.0f64);
    let alpha = pick_opt(alpha, section, "alpha");
    let alpha_physical = pick_opt(alpha_physical, section, "alpha_physical");
    ModelArgs {
        gamma,
        sigma,
        phases: resolve_phases(alpha, alpha_physical, None),
    }
}

pub fn run_cbc_ratios(inv: &Invocation, args: &CbcRatiosArgs) -> Result<(), CliError> {
    let section = inv.file.section("cbc-ratios");
    let n = pick(args.n, section, "n", 8usize);
    let xs_flag = pick_opt(args.x.clone(), section, "x");
    let model = resolve_model(
        section,
        args.gamma,
        args.sigma,
        args.alpha.clone(),
        args.alpha_physical.clone(),
    );
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
    let rel_tol = pick(args.rel_tol, section, "rel_tol", 1e-8f64);
    let substitution = pick(args.substitution.clone(), section, "substitution", "power-sub".to_string());
    let substitution = parse_substitution(&substitution)?;

    let table = load_zeros(zeros_path.as_deref(), n)?;
    let potential = SmoothPotential::covering(table.lambda(n))?;
    let xs = match &xs_flag {
        Some(v) => v.clone(),
        None => potential.turning_points(&table, n)?,
    };

    let resolved = table_of(vec![
        ("n", v_int(n)),
        ("x", v_list(&xs)),
        ("gamma", v_f64(model.gamma)),
        ("sigma", v_f64(model.sigma)),
        ("alpha", v_list(&model.phases)),
        ("rel_tol", v_f64(rel_tol)),
        ("substitution", v_str(if substitution == Substitution::PowerSub { "power-sub" } else { "gauss-jacobi" })),
    ]);
    let ctx = RunContext::create(&inv.outdir, "cbc-ratios", &inv.label, resolved)?;
    ctx.write_echo()?;

    let params = FractalParams::new(model.gamma, model.sigma, model.phases)?;
    let config = QuadratureConfig { rel_tol, substitution, ..QuadratureConfig::default() };
    let report = cbc_ratio_series(&table, &xs, &potential, &params, &config)?;
    let path = ctx.write_csv("cbc_ratios.csv", &report.to_csv())?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_adjust(inv: &Invocation, args: &AdjustArgs) -> Result<(), CliError> {
    let section = inv.file.section("adjust");
    let j = pick(args.j, section, "j", 1usize);
    if j == 0 {
        return Err(CliError::validation("level index j must be at least 1".into()));
    }
    let model = resolve_model(
        section,
        args.gamma,
        args.sigma,
        args.alpha.clone(),
        args.alpha_physical.clone(),
    );
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
    let rel_tol = pick(args.rel_tol, section, "rel_tol", 1e-8f64);

    let table = load_zeros(zeros_path.as_deref(), j)?;
    let lambda = table.lambda(j);
    let potential = SmoothPotential::covering(lambda)?;
    let x_smooth = potential.smooth_turning_point(lambda)?;
    let default_interval = default_adjust_interval(x_smooth);
    let search_lo = pick(args.search_lo, section, "search_lo", default_interval.0);
    let search_hi = pick(args.search_hi, section, "search_hi", default_interval.1);

    let resolved = table_of(vec![
        ("j", v_int(j)),
        ("gamma", v_f64(model.gamma)),
        ("sigma", v_f64(model.sigma)),
        ("alpha", v_list(&model.phases)),
        ("search_lo", v_f64(search_lo)),
        ("search_hi", v_f64(search_hi)),
        ("rel_tol", v_f64(rel_tol)),
    ]);
    let ctx = RunContext::create(&inv.outdir, "adjust", &inv.label, resolved)?;
    ctx.write_echo()?;

    let params = FractalParams::new(model.gamma, model.sigma, model.phases)?;
    let config = QuadratureConfig { rel_tol, ..QuadratureConfig::default() };
    let (x_adj, ratio) = adjust_turning_point(
        j,
        lambda,
        |t| susyzeta::phi_squared(t, &potential, &params),
        &config,
        (search_lo, search_hi),
    )?;

    #[derive(serde::Serialize)]
    struct AdjustOutcome {
        j: usize,
        lambda: f64,
        x_smooth: f64,
        x_adjusted: f64,
        ratio: f64,
    }
    let path = ctx.write_json(
        "adjust.json",
        &AdjustOutcome { j, lambda, x_smooth, x_adjusted: x_adj, ratio },
    )?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_fit(inv: &Invocation, args: &FitArgs) -> Result<(), CliError> {
    let section = inv.file.section("fit");
    let n = pick(args.n, section, "n", 7usize);
    let m = pick(args.m, section, "m", n);
    let seed = pick(args.seed, section, "seed", 0u64);
    let phase_mode = pick(args.phase_mode.clone(), section, "phase_mode", "free".to_string());
    let sigma_mode = pick(args.sigma.clone(), section, "sigma", "fixed1".to_string());
    let sigma_lo = pick(args.sigma_lo, section, "sigma_lo", 0.1f64);
    let sigma_hi = pick(args.sigma_hi, section, "sigma_hi", 10.0f64);
    let gamma_lo = pick(args.gamma_lo, section, "gamma_lo", 1.0f64);
    let gamma_hi = pick(args.gamma_hi, section, "gamma_hi", 5.0f64);
    let x_mode = pick(args.x_mode.clone(), section, "x_mode", "free".to_string());
    let w_susy = pick(args.w_susy, section, "w_susy", 1.0f64);
    let w_cbc = pick(args.w_cbc, section, "w_cbc", 1.0f64);
    let population = pick_opt(args.population, section, "population");
    let generations = pick(args.generations, section, "generations", 500usize);
    let de_f = pick(args.de_f, section, "de_f", 0.7f64);
    let de_cr = pick(args.de_cr, section, "de_cr", 0.9f64);
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
    let rel_tol = pick(args.rel_tol, section, "rel_tol", 1e-6f64);
    let node_budget = pick(args.node_budget, section, "node_budget", 30_000usize);

    let resolved = table_of(vec![
        ("n", v_int(n)),
        ("m", v_int(m)),
        ("seed", v_u64(seed)),
        ("phase_mode", v_str(phase_mode.clone())),
        ("sigma", v_str(sigma_mode.clone())),
        ("sigma_lo", v_f64(sigma_lo)),
        ("sigma_hi", v_f64(sigma_hi)),
        ("gamma_lo", v_f64(gamma_lo)),
        ("gamma_hi", v_f64(gamma_hi)),
        ("x_mode", v_str(x_mode.clone())),
        ("w_susy", v_f64(w_susy)),
        ("w_cbc", v_f64(w_cbc)),
        ("population", v_int(population.unwrap_or(0))),
        ("generations", v_int(generations)),
        ("de_f", v_f64(de_f)),
        ("de_cr", v_f64(de_cr)),
        ("rel_tol", v_f64(rel_tol)),
        ("node_budget", v_int(node_budget)),
    ]);
    let ctx = RunContext::create(&inv.outdir, "fit", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = load_zeros(zeros_path.as_deref(), n)?;
    let potential = SmoothPotential::covering(table.lambda(n))?;
    let mut problem = FitProblem::new(n, m, table, seed)?;
    problem.phase_mode = match phase_mode.as_str() {
        "free" => PhaseMode::Free,
        "zero" => PhaseMode::ZeroFixed,
        "monotone" => PhaseMode::Monotone,
        other => {
            return Err(CliError::validation(format!(
                "unknown phase mode {other:?} (expected free | zero | monotone)"
            )))
        }
    };
    problem.sigma_mode = match sigma_mode.as_str() {
        "fixed1" => SigmaMode::Fixed1,
        "free" => SigmaMode::Free { lo: sigma_lo, hi: sigma_hi },
        other => {
            return Err(CliError::validation(format!(
                "unknown sigma mode {other:?} (expected fixed1 | free)"
            )))
        }
    };
    problem.gamma_bounds = (gamma_lo, gamma_hi);
    problem.x_mode = match x_mode.as_str() {
        "smooth" => XMode::FixedSmooth,
        "free" => XMode::FreeIncreasing,
        other => {
            return Err(CliError::validation(format!(
                "unknown x mode {other:?} (expected smooth | free)"
            )))
        }
    };
    problem.weights = (w_susy, w_cbc);
    problem.population = population;
    problem.generations = generations;
    problem.f = de_f;
    problem.cr = de_cr;
    problem.quad.rel_tol = rel_tol;
    problem.quad.node_budget = node_budget;

    let result = differential_evolution(&problem, &potential)?;
    write_fit_artifacts(&ctx, &result)?;
    eprintln!(
        "fit: total {} (susy {}, cbc {})",
        format_g9(result.ssq_total),
        format_g9(result.ssq_susy),
        format_g9(result.ssq_cbc)
    );
    Ok(())
}

fn write_fit_artifacts(ctx: &RunContext, result: &FitResult) -> Result<(), CliError> {
    let path = ctx.write_json("fit.json", result)?;
    let mut history = String::from("generation,best_total\n");
    for (g, best) in result.history.iter().enumerate() {
        history.push_str(&format!("{g},{}\n", format_g9(*best)));
    }
    ctx.write_csv("history.csv", &history)?;
    ctx.write_csv("cbc_ratios.csv", &result.cbc.to_csv())?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_replay(inv: &Invocation, args: &ReplayArgs) -> Result<(), CliError> {
    let section = inv.file.section("replay");
    let gamma = pick(args.gamma, section, "gamma", 2.0f64);
    let sigma = pick(args.sigma, section, "sigma", 1.0f64);
    let alpha = pick_opt(args.alpha.clone(), section, "alpha");
    let alpha_physical = pick_opt(args.alpha_physical.clone(), section, "alpha_physical");
    let xs = pick_opt(args.x.clone(), section, "x")
        .ok_or_else(|| CliError::validation("replay requires --x turning points".into()))?;
    let n = pick(args.n, section, "n", xs.len());
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
    let rel_tol = pick(args.rel_tol, section, "rel_tol", 1e-8f64);
    let phases = resolve_phases(alpha, alpha_physical, Some(n));

    let resolved = table_of(vec![
        ("gamma", v_f64(gamma)),
        ("sigma", v_f64(sigma)),
        ("alpha", v_list(&phases)),
        ("x", v_list(&xs)),
        ("n", v_int(n)),
        ("rel_tol", v_f64(rel_tol)),
    ]);
    let ctx = RunContext::create(&inv.outdir, "replay", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = load_zeros(zeros_path.as_deref(), n)?;
    let potential = SmoothPotential::covering(table.lambda(n))?;
    let mut problem = FitProblem::new(n, phases.len(), table, 0)?;
    problem.sigma_mode = SigmaMode::Free { lo: 0.0, hi: f64::MAX };
    problem.quad.rel_tol = rel_tol;
    let params = FractalParams::new(gamma, sigma, phases)?;
    let result = replay(&params, &xs, &problem, &potential)?;
    write_fit_artifacts(&ctx, &result)?;
    eprintln!(
        "replay: total {} (susy {}, cbc {})",
        format_g9(result.ssq_total),
        format_g9(result.ssq_susy),
        format_g9(result.ssq_cbc)
    );
    Ok(())
}

pub fn run_iterate(inv: &Invocation, args: &IterateArgs) -> Result<(), CliError> {
    let section = inv.file.section("iterate");
    let n = pick(args.n, section, "n", 6usize);
    let iterations = pick(args.iterations, section, "iterations", 1usize);
    let gamma = pick(args.gamma, section, "gamma", 2.0f64);
    let seed = pick(args.seed, section, "seed", 0u64);
    let generations = pick(args.generations, section, "generations", 500usize);
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
    let rel_tol = pick(args.rel_tol, section, "rel_tol", 1e-6f64);

    let resolved = table_of(vec![
        ("n", v_int(n)),
        ("iterations", v_int(iterations)),
        ("gamma", v_f64(gamma)),
        ("seed", v_u64(seed)),
        ("generations", v_int(generations)),
        ("rel_tol", v_f64(rel_tol)),
    ]);
    let ctx = RunContext::create(&inv.outdir, "iterate", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = load_zeros(zeros_path.as_deref(), n)?;
    let potential = SmoothPotential::covering(table.lambda(n))?;
    let mut problem = FitProblem::new(n, n, table, seed)?;
    problem.gamma_bounds = (gamma, gamma);
    problem.generations = generations;
    problem.quad.rel_tol = rel_tol;
    let records = iterate_two_step(&problem, iterations, &potential)?;

    #[derive(serde::Serialize)]
    struct IterateOutcome<'a> {
        iterations: &'a [susyzeta::TwoStepIteration],
    }
    let path = ctx.write_json("iterate.json", &IterateOutcome { iterations: &records })?;
    let mut csv = String::from("iteration,j,x_adjusted,ratio\n");
    for (it, rec) in records.iter().enumerate() {
        for (idx, (x, r)) in rec.adjusted_x.iter().zip(&rec.adjusted_ratios).enumerate() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                it + 1,
                idx + 1,
                format_g9(*x),
                format_g9(*r)
            ));
        }
    }
    ctx.write_csv("adjusted.csv", &csv)?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_analyze(inv: &Invocation, args: &AnalyzeArgs) -> Result<(), CliError> {
    let section = inv.file.section("analyze");
    let rao = pick_opt(args.rao.clone(), section, "rao");
    let rao_file = pick_opt(args.rao_file.clone(), section, "rao_file");
    let correlate_a = pick_opt(args.correlate_a.clone(), section, "correlate_a");
    let correlate_b = pick_opt(args.correlate_b.clone(), section, "correlate_b");
    let grid = pick(args.grid, section, "grid", 1024usize);
    let residuals_path = pick_opt(args.residuals.clone(), section, "residuals");

    if rao.is_none() && rao_file.is_none() && correlate_a.is_none() && residuals_path.is_none() {
        return Err(CliError::validation(
            "analyze requires at least one of --rao/--rao-file, --correlate-a/--correlate-b, --residuals".into(),
        ));
    }

    let resolved = table_of(vec![
        ("grid", v_int(grid)),
        ("rao", v_str(if rao.is_some() || rao_file.is_some() { "yes" } else { "no" })),
        ("correlate", v_str(if correlate_a.is_some() { "yes" } else { "no" })),
        ("residuals", v_str(if residuals_path.is_some() { "yes" } else { "no" })),
    ]);
    let ctx = RunContext::create(&inv.outdir, "analyze", &inv.label, resolved)?;
    ctx.write_echo()?;

    let mut wrote = Vec::new();
    if rao.is_some() || rao_file.is_some() {
        let mut angles = rao.unwrap_or_default();
        if let Some(p) = rao_file {
            angles.extend(angles_from_file(&p)?);
        }
        let wrapped: Vec<f64> = angles.iter().map(|&a| wrap_angle(a)).collect();
        let (u, significance) = rao_spacing_statistic(&wrapped)?;
        #[derive(serde::Serialize)]
        struct RaoOutcome {
            n: usize,
            statistic_degrees: f64,
            significance: susyzeta::RaoSignificance,
        }
        wrote.push(ctx.write_json(
            "rao.json",
            &RaoOutcome { n: wrapped.len(), statistic_degrees: u, significance },
        )?);
    }
    if let (Some(pa), Some(pb)) = (&correlate_a, &correlate_b) {
        let a = angles_from_file(pa)?;
        let b = angles_from_file(pb)?;
        let curve = phase_shift_correlation(&a, &b, &uniform_theta_grid(grid))?;
        let mut csv = String::from("theta,correlation\n");
        for (theta, r) in &curve.points {
            csv.push_str(&format!("{},{}\n", format_g9(*theta), format_g9(*r)));
        }
        wrote.push(ctx.write_csv("correlation.csv", &csv)?);
        #[derive(serde::Serialize)]
        struct CorrelationSummary {
            base: f64,
            max: f64,
            plateau_lo: f64,
            plateau_hi: f64,
        }
        let summary = CorrelationSummary {
            base: curve.points[0].1,
            max: curve.max,
            plateau_lo: curve.plateau.0,
            plateau_hi: curve.plateau.1,
        };
        wrote.push(ctx.write_json("correlation.json", &summary)?);
    } else if correlate_a.is_some() != correlate_b.is_some() {
        return Err(CliError::validation(
            "correlation needs both --correlate-a and --correlate-b".into(),
        ));
    }
    if let Some(p) = residuals_path {
        let text = std::fs::read_to_string(&p)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", p.display())))?;
        let fit: FitResult = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("malformed fit result {}: {e}", p.display())))?;
        let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");
        let table = load_zeros(zeros_path.as_deref(), fit.x.len())?;
        let potential = SmoothPotential::covering(table.lambda(table.len()))?;
        let residuals = residual_series(&fit, &table, &potential)?;
        let mut csv = String::from("j,residual\n");
        for (i, r) in residuals.iter().enumerate() {
            csv.push_str(&format!("{},{}\n", i + 1, format_g9(*r)));
        }
        wrote.push(ctx.write_csv("residuals.csv", &csv)?);
    }
    for p in wrote {
        println!("{}", p.display());
    }
    Ok(())
}

pub fn run_identities(inv: &Invocation, args: &IdentitiesArgs) -> Result<(), CliError> {
    let section = inv.file.section("identities");
    let id = pick_opt(args.id, section, "id");
    let zeros_path = pick_opt(args.zeros.clone(), section, "zeros");

    let resolved = table_of(vec![(
        "id",
        v_str(id.map(|i| i.to_string()).unwrap_or_else(|| "all".into())),
    )]);
    let ctx = RunContext::create(&inv.outdir, "identities", &inv.label, resolved)?;
    ctx.write_echo()?;

    let table = load_zeros(zeros_path.as_deref(), 9)?;
    let constants = NamedConstants::compute();
    let ids: Vec<usize> = match id {
        Some(i) => vec![i],
        None => (1..=5).collect(),
    };
    let checks = ids
        .iter()
        .map(|&i| fractal_identity_check(i, &constants, &table))
        .collect::<Result<Vec<_>, _>>()?;
    #[derive(serde::Serialize)]
    struct IdentityOutcome {
        constants: NamedConstants,
        checks: Vec<susyzeta::IdentityCheck>,
    }
    let path = ctx.write_json("identities.json", &IdentityOutcome { constants, checks })?;
    println!("{}", path.display());
    Ok(())
}

pub fn run_dominici(inv: &Invocation, args: &DominiciArgs) -> Result<(), CliError> {
    let section = inv.file.section("dominici");
    let x_max = pick(args.x_max, section, "x_max", 0.13f64);
    let samples = pick(args.samples, section, "samples", 53usize);
    if samples < 2 {
        return Err(CliError::validation("samples must be at least 2".into()));
    }

    let resolved = table_of(vec![("x_max", v_f64(x_max)), ("samples", v_int(samples))]);
    let ctx = RunContext::create(&inv.outdir, "dominici", &inv.label, resolved)?;
    ctx.write_echo()?;

    let potential = SmoothPotential::with_defaults();
    let mut csv = String::from("x,series_1,series_2,series_3,direct\n");
    for i in 0..samples {
        let x = x_max * i as f64 / (samples - 1) as f64;
        let s1 = potential.dominici_series(x, 1)?;
        let s2 = potential.dominici_series(x, 2)?;
        let s3 = potential.dominici_series(x, 3)?;
        let direct = potential.v_of_x(x)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            format_g9(x),
            format_g9(s1),
            format_g9(s2),
            format_g9(s3),
            format_g9(direct)
        ));
    }
    let path = ctx.write_csv("dominici.csv", &csv)?;
    println!("{}", path.display());
    Ok(())
}
