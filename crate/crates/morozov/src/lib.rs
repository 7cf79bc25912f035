//! Tikhonov regularization for nonlinear ill-posed operator equations with
//! the regularization parameter chosen by a widened Morozov discrepancy
//! principle.
//!
//! The classical discrepancy principle asks for an α whose residual lands in
//! `[τ1δ, τ2δ]`; for nonlinear problems the discrepancy can jump over that
//! window as α varies. Widening the upper edge to `cδ` with
//! `c = max{τ2, (3+2γ)τ1}` — γ being the tangential-cone constant of the
//! operator — makes the window reachable along the α-path, and
//! [`mdp::alpha_search`] finds it by geometric reduction plus bisection.
//!
//! The crate ships two benchmark problems: sparse recovery through a
//! componentwise-nonlinear compressive-sensing operator (ℓ1 penalty, solved
//! by proximal gradient / iterative soft thresholding) and a two-sphere 1-D
//! gravity anomaly inversion (scaled quadratic penalty, solved by a
//! Landweber–Tikhonov iteration). See the `examples/` directory for
//! runnable entry points per capability, or the `morozov` binary for the
//! config-file driven CLI.
//!
//! Reproducibility: every random draw flows from a 64-bit-seeded ChaCha8
//! stream; multi-run studies derive child seeds with a splitmix64 mix; all
//! discrepancy-principle logic uses the measured noise norm δ, never a
//! nominal one.

pub mod config;
pub mod error;
pub mod experiments;
pub mod mdp;
pub mod operators;
pub mod output;
pub mod penalties;
pub mod problem;
pub mod runner;
pub mod solvers;

pub use config::{parse_config, parse_config_str, Experiment, OutputFormat, RunConfig, RunMode};
pub use error::{Error, Result};
pub use experiments::{
    add_awgn, bregman_rate_study, child_seed, gen_cs_problem, gen_gravity_problem,
    gen_sparse_signal, noise_level_study, relative_error, run_cs_experiment,
    run_gravity_experiment, spearman, sweep_alpha, AlphaMode, BregmanRateStudy, CsConfig,
    ExperimentRun, GravityConfig, ProblemBundle, StudyRecord, SweepRecord, WarmStartPolicy,
};
pub use mdp::{
    alpha_search, classical_gap_report, compute_c, estimate_gamma, mdp_window_check,
    verify_data_condition, AlphaSearch, MdpConfig, SearchOutcome, WindowClass,
};
pub use operators::{
    adjoint_identity_error, check_jacobian_fd, spectral_norm, CsOperator, ForwardOperator,
    GravityOperator, LinearOperator, Sphere,
};
pub use output::{
    emit_plot_data, read_manifest, run_paths, write_manifest, write_study_csv, write_sweep_csv,
    write_trace_csv, Manifest, ManifestSummary, PlotData, PlotKind, RunPaths,
};
pub use penalties::{bregman_distance, soft_threshold, L1Penalty, Penalty, QuadraticPenalty};
pub use problem::{DiscrepancyProblem, IstaProblem, LandweberProblem, ScalarLasso};
pub use runner::{replay, run, run_checks, CheckLine};
pub use solvers::{
    check_first_order, ista_minimize, landweber_tikhonov_minimize, LandweberOptions,
    RegularizationGate, SolverConfig, SolverResult, SolverStatus, StepPolicy,
};
