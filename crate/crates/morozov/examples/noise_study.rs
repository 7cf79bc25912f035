//! Noise-level study: run the compressive-sensing experiment across SNR
//! levels with several seeds each and report rank correlations. The chosen α
//! should grow with the noise level δ, and the reconstruction error should
//! shrink as the SNR improves.
//!
//! Run with: cargo run --release --example noise_study

use morozov::{noise_level_study, spearman, AlphaMode, CsConfig, StudyRecord};

fn main() {
    let snrs: Vec<f64> = (0..7).map(|i| 30.0 + 5.0 * i as f64).collect();
    let seeds_per_level = 5;
    let study = noise_level_study(&CsConfig::default(), &snrs, seeds_per_level, AlphaMode::Algorithm1)
        .expect("study failed");

    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>12} {:>10}",
        "snr", "seed", "delta", "alpha", "discrepancy", "Rerror"
    );
    for r in &study {
        println!(
            "{:>6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.4}",
            r.snr_db.unwrap_or(f64::NAN),
            r.seed,
            r.delta,
            r.alpha,
            r.discrepancy,
            r.relative_error
        );
    }

    let ok: Vec<&StudyRecord> = study.iter().filter(|r| !r.outcome.starts_with("error")).collect();
    let deltas: Vec<f64> = ok.iter().map(|r| r.delta).collect();
    let alphas: Vec<f64> = ok.iter().map(|r| r.alpha).collect();
    let snr: Vec<f64> = ok.iter().map(|r| r.snr_db.unwrap()).collect();
    let rerr: Vec<f64> = ok.iter().map(|r| r.relative_error).collect();
    println!(
        "\n{} of {} runs accepted",
        ok.len(),
        study.len()
    );
    println!(
        "spearman(delta, alpha)  = {:+.3}  (expected positive: noisier data needs more regularization)",
        spearman(&deltas, &alphas).unwrap()
    );
    println!(
        "spearman(snr, Rerror)   = {:+.3}  (expected negative: cleaner data reconstructs better)",
        spearman(&snr, &rerr).unwrap()
    );
}
