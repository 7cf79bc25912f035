//! Run orchestration: dispatches a resolved configuration to the right
//! experiment, persists records, traces, plot data, and the manifest, and
//! supports bit-identical replay from a manifest.

use std::path::Path;

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, RunConfig, RunMode};
use crate::error::{Error, Result};
use crate::experiments::{
    bregman_rate_study, gen_cs_problem, gen_gravity_problem, noise_level_study, run_cs_experiment,
    run_gravity_experiment, sweep_alpha, ExperimentRun, WarmStartPolicy,
};
use crate::mdp::{alpha_search, MdpConfig};
use crate::operators::{adjoint_identity_error, check_jacobian_fd, ForwardOperator};
use crate::output::{
    emit_plot_data, run_paths, write_manifest, write_study_csv, write_sweep_csv, write_trace_csv,
    Manifest, PlotData, PlotKind,
};
use crate::penalties::{soft_threshold, L1Penalty, Penalty};
use crate::problem::{IstaProblem, LandweberProblem, ScalarLasso};
use crate::solvers::{LandweberOptions, SolverConfig, StepPolicy};

/// One line of the `check` mode's pass/fail table.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Executes a resolved run configuration end to end, returning the written
/// manifest. Check-mode failures are reported in the manifest summary, not
/// as an error.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_inner(cfg))
}

fn run_inner(cfg: &RunConfig) -> Result<Manifest> {
    std::fs::create_dir_all(&cfg.out)?;
    let paths = run_paths(&cfg.out);
    let mut manifest = Manifest::new(cfg.clone());

    match (cfg.experiment, cfg.mode) {
        (Experiment::Cs, RunMode::Algorithm1 | RunMode::UpperBound) => {
            let mode = cfg.mode.alpha_mode().expect("alpha mode");
            let run = run_cs_experiment(&cfg.cs, mode)?;
            persist_single_run(cfg, &mut manifest, &run)?;
            if cfg.format.wants_csv() {
                let overlay = cfg.out.join("signal_overlay.csv");
                emit_plot_data(
                    &PlotData::SignalOverlay {
                        x_true: &run.x_true,
                        x_recovered: &run.result.x,
                    },
                    &overlay,
                )?;
                manifest.files.push("signal_overlay.csv".into());
            }
        }
        (Experiment::Gravity, RunMode::Algorithm1 | RunMode::UpperBound) => {
            let mode = cfg.mode.alpha_mode().expect("alpha mode");
            let run = run_gravity_experiment(&cfg.gravity, mode)?;
            persist_single_run(cfg, &mut manifest, &run)?;
            if cfg.format.wants_csv() {
                let bundle = gen_gravity_problem(&cfg.gravity)?;
                let g_reconstructed = bundle.op.evaluate(&run.result.x)?;
                let profile = cfg.out.join("gravity_profile.csv");
                emit_plot_data(
                    &PlotData::GravityProfile {
                        stations: bundle.op.stations(),
                        g_clean: &bundle.y_clean,
                        g_observed: &bundle.y_delta,
                        g_reconstructed: &g_reconstructed,
                    },
                    &profile,
                )?;
                manifest.files.push("gravity_profile.csv".into());
            }
        }
        (Experiment::ScalarOracle, RunMode::Algorithm1) => {
            let problem = ScalarLasso { y: cfg.scalar.y };
            let search = alpha_search(&problem, &MdpConfig::default(), cfg.scalar.delta)?;
            if cfg.format.wants_csv() {
                write_trace_csv(&paths.trace, &search.trace)?;
                manifest.files.push("trace.csv".into());
            }
            manifest.summary.delta = Some(cfg.scalar.delta);
            manifest.summary.alpha = Some(search.alpha);
            manifest.summary.discrepancy = Some(search.result.discrepancy);
            manifest.summary.outcome = Some(search.trace.outcome.as_str().into());
        }
        (Experiment::Cs, RunMode::Sweep) => {
            let bundle = gen_cs_problem(&cfg.cs)?;
            let problem = IstaProblem {
                op: &bundle.op,
                y_delta: bundle.y_delta.clone(),
                cfg: SolverConfig {
                    max_iterations: cfg.cs.max_iterations,
                    tolerance: cfg.cs.tolerance,
                    ..SolverConfig::default()
                },
            };
            let records = sweep_alpha(&problem, &cfg.alphas()?, WarmStartPolicy::Chained, Some(&bundle.x_true))?;
            persist_sweep(cfg, &mut manifest, &records, bundle.delta, cfg.cs.tau1, cfg.cs.tau2, cfg.cs.mdp().c())?;
        }
        (Experiment::Gravity, RunMode::Sweep) => {
            let bundle = gen_gravity_problem(&cfg.gravity)?;
            let problem = LandweberProblem {
                op: &bundle.op,
                y_delta: bundle.y_delta.clone(),
                penalty_scaling: DVector::from_element(4, 1.0 / cfg.gravity.penalty_scale),
                cfg: SolverConfig {
                    max_iterations: cfg.gravity.maxiter,
                    tolerance: cfg.gravity.tolerance,
                    step_policy: StepPolicy::Fixed(1.0),
                    warm_start: Some(DVector::from_vec(cfg.gravity.init_params.clone())),
                    record_history: false,
                },
                opts: LandweberOptions::default(),
            chain_warm_starts: false,
            };
            let records = sweep_alpha(&problem, &cfg.alphas()?, WarmStartPolicy::Chained, Some(&bundle.x_true))?;
            persist_sweep(
                cfg,
                &mut manifest,
                &records,
                bundle.delta,
                cfg.gravity.tau1,
                cfg.gravity.tau2,
                cfg.gravity.mdp().c(),
            )?;
        }
        (Experiment::ScalarOracle, RunMode::Sweep) => {
            let problem = ScalarLasso { y: cfg.scalar.y };
            let records = sweep_alpha(&problem, &cfg.alphas()?, WarmStartPolicy::Cold, None)?;
            let mdp = MdpConfig::default();
            persist_sweep(cfg, &mut manifest, &records, cfg.scalar.delta, mdp.tau1, mdp.tau2, mdp.c())?;
        }
        (Experiment::Cs, RunMode::NoiseStudy) => {
            let records = noise_level_study(
                &cfg.cs,
                &cfg.study.snr_list,
                cfg.study.seeds_per_level,
                crate::experiments::AlphaMode::Algorithm1,
            )?;
            if cfg.format.wants_csv() {
                write_study_csv(&paths.study, &records)?;
                manifest.files.push("study.csv".into());
                for kind in [PlotKind::DeltaVsSnr, PlotKind::AlphaVsSnr, PlotKind::RerrorVsSnr] {
                    let file = format!("{}.csv", kind.as_str().replace('-', "_"));
                    emit_plot_data(&PlotData::Study { kind, records: &records }, &cfg.out.join(&file))?;
                    manifest.files.push(file);
                }
            }
        }
        (Experiment::Gravity, RunMode::RateStudy) => {
            let study = bregman_rate_study(&cfg.gravity, &cfg.study.noise_fractions)?;
            if cfg.format.wants_csv() {
                write_study_csv(&paths.study, &study.records)?;
                manifest.files.push("study.csv".into());
            }
            manifest.summary.bregman_slope = Some(study.slope);
        }
        (_, RunMode::Check) => {
            let lines = run_checks()?;
            let all = lines.iter().all(|l| l.passed);
            for l in &lines {
                println!(
                    "check {:<28} {}  {}",
                    l.name,
                    if l.passed { "pass" } else { "FAIL" },
                    l.detail
                );
            }
            manifest.summary.checks_passed = Some(all);
        }
        (experiment, mode) => {
            return Err(Error::Config(format!(
                "mode {} is not defined for experiment {}",
                mode.as_str(),
                experiment.as_str()
            )));
        }
    }

    if cfg.format.wants_json() || cfg.format.wants_csv() {
        manifest.files.push("manifest.json".into());
        write_manifest(&paths.manifest, &manifest)?;
    }
    Ok(manifest)
}

fn persist_single_run(cfg: &RunConfig, manifest: &mut Manifest, run: &ExperimentRun) -> Result<()> {
    let paths = run_paths(&cfg.out);
    if cfg.format.wants_csv() {
        write_study_csv(&paths.study, std::slice::from_ref(&run.record))?;
        manifest.files.push("study.csv".into());
        if let Some(trace) = &run.trace {
            write_trace_csv(&paths.trace, trace)?;
            manifest.files.push("trace.csv".into());
        }
    }
    manifest.summary.delta = Some(run.delta);
    manifest.summary.c_delta = Some(run.c * run.delta);
    manifest.summary.alpha = Some(run.alpha);
    manifest.summary.relative_error = Some(run.record.relative_error);
    manifest.summary.discrepancy = Some(run.result.discrepancy);
    manifest.summary.outcome = Some(run.record.outcome.clone());
    Ok(())
}

fn persist_sweep(
    cfg: &RunConfig,
    manifest: &mut Manifest,
    records: &[crate::experiments::SweepRecord],
    delta: f64,
    tau1: f64,
    tau2: f64,
    c: f64,
) -> Result<()> {
    let paths = run_paths(&cfg.out);
    if cfg.format.wants_csv() {
        write_sweep_csv(&paths.sweep, records)?;
        manifest.files.push("sweep.csv".into());
        emit_plot_data(
            &PlotData::DiscrepancyVsAlpha {
                sweep: records,
                delta,
                tau1,
                tau2,
                c,
            },
            &cfg.out.join("discrepancy_vs_alpha.csv"),
        )?;
        manifest.files.push("discrepancy_vs_alpha.csv".into());
        emit_plot_data(&PlotData::RerrorVsAlpha { sweep: records }, &cfg.out.join("rerror_vs_alpha.csv"))?;
        manifest.files.push("rerror_vs_alpha.csv".into());
    }
    manifest.summary.delta = Some(delta);
    manifest.summary.c_delta = Some(c * delta);
    Ok(())
}

/// Reruns the configuration embedded in a manifest into `out`. Numeric
/// outputs are bit-identical to the original run's.
pub fn replay(manifest: &Manifest, out: &Path) -> Result<Manifest> {
    let mut cfg = manifest.config.clone();
    cfg.out = out.to_path_buf();
    run(&cfg)
}

/// The invariant suite behind `check` mode: Jacobian-vs-finite-difference
/// agreement and adjoint identity on both operators, the soft-threshold
/// prox optimality, and discrepancy monotonicity on the closed-form oracle.
pub fn run_checks() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C0FFEE);

    let cs = gen_cs_problem(&crate::experiments::CsConfig::default())?;
    let x = DVector::from_fn(200, |_, _| rng.gen_range(-1.0..1.0));
    let fd = check_jacobian_fd(&cs.op, &x)?;
    lines.push(CheckLine {
        name: "cs-jacobian-fd",
        passed: fd.max_rel_error < 1e-5,
        detail: format!("max rel error {:.3e}", fd.max_rel_error),
    });
    let adj = max_adjoint_error(&cs.op, &x, &mut rng)?;
    lines.push(CheckLine {
        name: "cs-adjoint-identity",
        passed: adj <= 1e-10,
        detail: format!("max defect {adj:.3e}"),
    });

    let gravity = gen_gravity_problem(&crate::experiments::GravityConfig::default())?;
    let params = DVector::from_vec(vec![-180.0, 140.0, 210.0, 190.0]);
    let fd = check_jacobian_fd(&gravity.op, &params)?;
    lines.push(CheckLine {
        name: "gravity-jacobian-fd",
        passed: fd.max_rel_error < 1e-5,
        detail: format!("max rel error {:.3e}", fd.max_rel_error),
    });
    let adj = max_adjoint_error(&gravity.op, &params, &mut rng)?;
    lines.push(CheckLine {
        name: "gravity-adjoint-identity",
        passed: adj <= 1e-10,
        detail: format!("max defect {adj:.3e}"),
    });

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = DVector::from_fn(8, |_, _| rng.gen_range(-3.0..3.0));
        let t = rng.gen_range(0.0..2.0);
        let x = soft_threshold(&v, t)?;
        let objective =
            |z: &DVector<f64>| 0.5 * (z - &v).norm_squared() + t * L1Penalty.value(z);
        let base = objective(&x);
        for _ in 0..50 {
            let z = &x + DVector::from_fn(8, |_, _| rng.gen_range(-0.5..0.5));
            worst = worst.max(base - objective(&z));
        }
    }
    lines.push(CheckLine {
        name: "soft-threshold-prox",
        passed: worst <= 1e-9,
        detail: format!("max objective excess {worst:.3e}"),
    });

    let oracle = ScalarLasso::default();
    let mut previous = -1.0;
    let mut monotone = true;
    for k in 1..=40 {
        let alpha = 0.05 * k as f64;
        let d = crate::problem::DiscrepancyProblem::solve_at(&oracle, alpha, None)?.discrepancy;
        if d < previous - 1e-12 {
            monotone = false;
        }
        previous = d;
    }
    lines.push(CheckLine {
        name: "oracle-discrepancy-monotone",
        passed: monotone,
        detail: "discrepancy nondecreasing in alpha".into(),
    });

    Ok(lines)
}

fn max_adjoint_error(
    op: &dyn ForwardOperator,
    x: &DVector<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = DVector::from_fn(op.input_dim(), |_, _| rng.gen_range(-1.0..1.0));
        let w = DVector::from_fn(op.output_dim(), |_, _| rng.gen_range(-1.0..1.0));
        worst = worst.max(adjoint_identity_error(op, x, &v, &w)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;
    use tempfile::tempdir;

    #[test]
    fn scalar_algorithm1_writes_trace_and_manifest() {
        let dir = tempdir().unwrap();
        let mut cfg = parse_config_str("experiment = \"scalar-oracle\"\nmode = \"algorithm1\"\n").unwrap();
        cfg.out = dir.path().to_path_buf();
        let manifest = run(&cfg).unwrap();
        assert_eq!(manifest.summary.outcome.as_deref(), Some("accepted"));
        assert!(dir.path().join("trace.csv").exists());
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn scalar_sweep_writes_expected_files() {
        let dir = tempdir().unwrap();
        let mut cfg = parse_config_str(
            "experiment = \"scalar-oracle\"\nmode = \"sweep\"\nalpha_grid = \"lin:0.1:1.0:10\"\n",
        )
        .unwrap();
        cfg.out = dir.path().to_path_buf();
        let manifest = run(&cfg).unwrap();
        assert!(manifest.files.contains(&"sweep.csv".to_string()));
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert!(dir.path().join("discrepancy_vs_alpha.csv").exists());
    }

    #[test]
    fn undefined_mode_experiment_combination_rejected() {
        let dir = tempdir().unwrap();
        let mut cfg = parse_config_str("experiment = \"cs\"\nmode = \"rate-study\"\n").unwrap();
        cfg.out = dir.path().to_path_buf();
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn scalar_replay_is_bit_identical() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let mut cfg = parse_config_str(
            "experiment = \"scalar-oracle\"\nmode = \"sweep\"\nalpha_grid = \"log:0.01:1:8\"\n",
        )
        .unwrap();
        cfg.out = dir_a.path().to_path_buf();
        let manifest = run(&cfg).unwrap();
        replay(&manifest, dir_b.path()).unwrap();
        for name in ["sweep.csv", "discrepancy_vs_alpha.csv", "rerror_vs_alpha.csv"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs");
        }
    }

    #[test]
    fn check_suite_passes() {
        let lines = run_checks().unwrap();
        for l in &lines {
            assert!(l.passed, "check {} failed: {}", l.name, l.detail);
        }
    }
}
