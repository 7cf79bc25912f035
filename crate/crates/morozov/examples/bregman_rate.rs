//! Convergence-rate study: solve the gravity problem at shrinking noise
//! fractions and fit the Bregman distance to the true parameters against the
//! noise level δ in log-log scale. A slope near 1 is the linear rate
//! d(x_α, x†) = O(δ) expected when the discrepancy principle picks α.
//!
//! Run with: cargo run --release --example bregman_rate

use morozov::{bregman_rate_study, GravityConfig};

fn main() {
    let fracs = [0.02, 0.01, 0.005, 0.0025, 0.00125];
    let study = bregman_rate_study(&GravityConfig::default(), &fracs).expect("study failed");

    println!(
        "{:>10} {:>12} {:>12} {:>14} {:>10}",
        "noise", "delta", "alpha", "bregman d", "Rerror"
    );
    for r in &study.records {
        println!(
            "{:>10} {:>12.4e} {:>12.4e} {:>14.6e} {:>10.4}",
            format!("{:.3}%", 100.0 * r.noise_fraction.unwrap_or(f64::NAN)),
            r.delta,
            r.alpha,
            r.bregman_distance.unwrap_or(f64::NAN),
            r.relative_error
        );
    }

    println!(
        "\nlog-log fit over {} points ({} excluded): d ~ delta^{:.3}",
        study.fit_points.len(),
        study.excluded,
        study.slope
    );
}
