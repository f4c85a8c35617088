use susyzeta::*;
use std::time::Instant;

fn main() {
    let potential = SmoothPotential::with_defaults();
    for seed in [42u64, 1, 2, 3] {
        let mut problem = FitProblem::new(7, 7, ZeroTable::reference().take(7).unwrap(), seed).unwrap();
        problem.sigma_mode = SigmaMode::free_default();
        problem.x_mode = XMode::FreeIncreasing;
        problem.generations = 500;
        problem.population = Some(96);
        problem.quad.rel_tol = 1e-5;
        problem.quad.node_budget = 12_000;
        let t0 = Instant::now();
        match differential_evolution(&problem, &potential) {
            Ok(result) => {
                let strict = FitProblem { quad: QuadratureConfig::default(), ..problem.clone() };
                let rescored = replay(&result.params, &result.x, &strict, &potential).unwrap();
                println!(
                    "seed={seed}: fit total={:.4}  rescored={:.4}  gamma={:.4} sigma={:.4}  ({:.1?})",
                    result.ssq_total, rescored.ssq_total, result.params.gamma, result.params.sigma,
                    t0.elapsed()
                );
            }
            Err(e) => println!("seed={seed}: FAILED {e}"),
        }
    }
}
