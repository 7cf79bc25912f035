//! The closed-form scalar lasso problem: minimizing ½(x − y)² + α|x| gives
//! the soft-thresholded solution, whose discrepancy is exactly min(α, |y|).
//! This makes every step of the α search verifiable by hand, so it doubles
//! as a walkthrough of the grow/reduce/bisect phases.
//!
//! Run with: cargo run --release --example scalar_oracle

use morozov::{alpha_search, MdpConfig, ScalarLasso};

fn main() {
    let problem = ScalarLasso::default();
    let delta = 0.2;
    let cfg = MdpConfig::default();
    println!(
        "y = {}, delta = {delta}, window = [{}, {}] (c = {})",
        problem.y,
        cfg.tau1 * delta,
        cfg.c() * delta,
        cfg.c()
    );

    let search = alpha_search(&problem, &cfg, delta).expect("search failed");
    println!("\n{:>4} {:>8} {:>12} {:>12}", "step", "phase", "alpha", "discrepancy");
    for s in &search.trace.steps {
        println!(
            "{:>4} {:>8} {:>12.6e} {:>12.6e}",
            s.step,
            s.phase.as_str(),
            s.alpha,
            s.discrepancy
        );
    }
    if let Some((lo, hi)) = search.trace.bracket {
        println!("\nbracket: [{lo:.6e}, {hi:.6e}]");
    }
    println!(
        "accepted alpha = {:.6e}, discrepancy = {:.6e} ({:.3} delta), outcome = {:?}",
        search.alpha,
        search.result.discrepancy,
        search.result.discrepancy / delta,
        search.trace.outcome
    );
}
