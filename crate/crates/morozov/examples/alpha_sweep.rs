//! Sweep the regularization parameter on the compressive-sensing problem and
//! print the discrepancy/penalty/functional path, the basis of the
//! monotonicity diagnostics: as α grows, the discrepancy G and the minimum
//! value m of the Tikhonov functional never decrease while the penalty R
//! never increases.
//!
//! Run with: cargo run --release --example alpha_sweep

use morozov::{
    gen_cs_problem, sweep_alpha, CsConfig, IstaProblem, SolverConfig, WarmStartPolicy,
};

fn main() {
    let cfg = CsConfig::default();
    let bundle = gen_cs_problem(&cfg).expect("problem generation failed");
    let problem = IstaProblem {
        op: &bundle.op,
        y_delta: bundle.y_delta.clone(),
        cfg: SolverConfig {
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
            ..SolverConfig::default()
        },
    };

    let n = 13;
    let (lo, hi) = (1e-4f64, 1.0f64);
    let grid: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();

    let rows = sweep_alpha(&problem, &grid, WarmStartPolicy::Chained, Some(&bundle.x_true))
        .expect("sweep failed");

    println!("delta = {:.4e}", bundle.delta);
    println!(
        "{:>12} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "alpha", "G", "R", "m", "Rerror", "status"
    );
    for r in &rows {
        println!(
            "{:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.4} {:>10}",
            r.alpha, r.discrepancy, r.penalty, r.functional, r.relative_error, r.status
        );
    }
}
