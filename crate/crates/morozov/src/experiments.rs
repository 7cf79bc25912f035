//! Synthetic problem generation (sparse signals with AWGN, two-sphere
//! gravity scenes with proportional noise), the two experiment drivers, the
//! α-sweep, the noise-level study, and the Bregman-rate study.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{alpha_search, AlphaSearchTrace, MdpConfig, SearchOutcome};
use crate::operators::{spectral_norm, CsOperator, ForwardOperator, GravityOperator, Sphere};
use crate::penalties::{bregman_distance, QuadraticPenalty};
use crate::problem::{DiscrepancyProblem, IstaProblem, LandweberProblem};
use crate::solvers::{LandweberOptions, SolverConfig, SolverResult, StepPolicy};

/// Derives an independent child seed from a base seed and a run index
/// (splitmix64 finalizer over the mixed pair).
pub fn child_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `‖x̂ − x†‖ / ‖x†‖`; rejects a zero true solution.
pub fn relative_error(x_hat: &DVector<f64>, x_true: &DVector<f64>) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            got: x_hat.len(),
        });
    }
    let denom = x_true.norm();
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "relative error undefined for a zero true solution".into(),
        ));
    }
    Ok((x_hat - x_true).norm() / denom)
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx).powi(2);
        dy += (b - my).powi(2);
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::InvalidInput("constant sequence has no rank correlation".into()));
    }
    Ok(num / (dx * dy).sqrt())
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[idx[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// How the regularization parameter is chosen by an experiment driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// Grow/reduce/bisect search for a discrepancy in `[τ1δ, cδ]`.
    Algorithm1,
    /// Incremental grid scan for the largest α with discrepancy ≤ cδ.
    UpperBound,
}

impl AlphaMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlphaMode::Algorithm1 => "algorithm1",
            AlphaMode::UpperBound => "upper_bound",
        }
    }
}

/// Compressive-sensing experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CsConfig {
    pub n: usize,
    pub m: usize,
    /// Number of impulses in the true signal.
    pub p: usize,
    pub snr_db: f64,
    pub matrix_scale: f64,
    /// Componentwise exponent d in the pre-map x + x^d.
    pub pre_power: u32,
    /// Componentwise exponent of the post-map.
    pub post_power: u32,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
    /// Starting α of the parameter search.
    pub alpha0: f64,
    /// Geometric reduction factor of the parameter search.
    pub q: f64,
    pub seed: u64,
    /// Impulse magnitudes are drawn uniformly from this range, random sign.
    pub amplitude_range: (f64, f64),
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for CsConfig {
    fn default() -> Self {
        Self {
            n: 200,
            m: 80,
            p: 16,
            snr_db: 60.0,
            matrix_scale: 0.05,
            pre_power: 3,
            post_power: 1,
            tau1: 1.0,
            tau2: 2.0,
            gamma: 0.5,
            alpha0: 1.0,
            q: 0.5,
            seed: 1,
            amplitude_range: (0.5, 1.5),
            max_iterations: 2000,
            tolerance: 1e-8,
        }
    }
}

impl CsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p > self.n {
            return Err(Error::InvalidInput("p must not exceed n".into()));
        }
        if self.m > self.n {
            return Err(Error::InvalidInput("m must not exceed n".into()));
        }
        if !(self.matrix_scale > 0.0) {
            return Err(Error::InvalidInput("matrix_scale must be positive".into()));
        }
        if !(self.amplitude_range.0 > 0.0 && self.amplitude_range.1 >= self.amplitude_range.0) {
            return Err(Error::InvalidInput("amplitude_range must be positive and ordered".into()));
        }
        Ok(())
    }

    pub fn mdp(&self) -> MdpConfig {
        MdpConfig {
            tau1: self.tau1,
            tau2: self.tau2,
            gamma: self.gamma,
            alpha0: self.alpha0,
            q: self.q,
            ..MdpConfig::default()
        }
    }
}

/// Two-sphere gravity experiment configuration. Parameters are
/// `[x0_1, d_1, x0_2, d_2]` (center offset and depth per sphere, meters).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    pub station_count: usize,
    pub station_range: (f64, f64),
    pub true_params: Vec<f64>,
    pub init_params: Vec<f64>,
    pub radii: (f64, f64),
    /// kg/m³, shared by both spheres.
    pub density_contrast: f64,
    pub noise_fraction: f64,
    pub maxiter: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
    /// Starting α of the parameter search. The natural α scale of this
    /// problem is set by the data-gradient/penalty-gradient force balance
    /// (~1e-13); starting below the acceptance window enters it from the
    /// well-fitted side.
    pub alpha0: f64,
    /// Geometric factor of the parameter search.
    pub q: f64,
    pub seed: u64,
    /// Per-parameter magnitude scale s (meters); the penalty is ½‖x/s‖².
    pub penalty_scale: f64,
    pub tolerance: f64,
}

impl Default for GravityConfig {
    fn default() -> Self {
        Self {
            station_count: 50,
            station_range: (-500.0, 500.0),
            true_params: vec![-200.0, 150.0, 200.0, 200.0],
            init_params: vec![-150.0, 100.0, 150.0, 250.0],
            radii: (100.0, 100.0),
            density_contrast: 300.0,
            noise_fraction: 0.02,
            maxiter: 500,
            tau1: 1.102,
            tau2: 2.771,
            gamma: 0.5,
            alpha0: 1e-13,
            q: 0.5,
            seed: 1,
            penalty_scale: 100.0,
            tolerance: 1e-8,
        }
    }
}

impl GravityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.station_range.1 > self.station_range.0) {
            return Err(Error::InvalidInput("station_range must be nondegenerate".into()));
        }
        if self.noise_fraction < 0.0 {
            return Err(Error::InvalidInput("noise_fraction must be nonnegative".into()));
        }
        if self.true_params.len() != 4 || self.init_params.len() != 4 {
            return Err(Error::InvalidInput("parameter vectors must have length 4".into()));
        }
        if self.station_count < 2 {
            return Err(Error::InvalidInput("need at least two stations".into()));
        }
        if !(self.penalty_scale > 0.0) {
            return Err(Error::InvalidInput("penalty_scale must be positive".into()));
        }
        Ok(())
    }

    pub fn mdp(&self) -> MdpConfig {
        MdpConfig {
            tau1: self.tau1,
            tau2: self.tau2,
            gamma: self.gamma,
            alpha0: self.alpha0,
            q: self.q,
            ..MdpConfig::default()
        }
    }
}

/// Generated problem bundle shared by both experiments.
#[derive(Debug, Clone)]
pub struct ProblemBundle<Op> {
    pub op: Op,
    pub x_true: DVector<f64>,
    pub y_clean: DVector<f64>,
    pub y_delta: DVector<f64>,
    /// Measured noise norm `‖y_clean − y_delta‖`.
    pub delta: f64,
}

/// Sparse impulse signal: exactly `p` nonzeros at distinct uniform
/// positions, magnitudes uniform in `amplitude_range`, random sign.
pub fn gen_sparse_signal(
    n: usize,
    p: usize,
    amplitude_range: (f64, f64),
    seed: u64,
) -> Result<DVector<f64>> {
    if p > n {
        return Err(Error::InvalidInput("p must not exceed n".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut rng);
    let mut x = DVector::zeros(n);
    for &i in positions.iter().take(p) {
        let magnitude = rng.gen_range(amplitude_range.0..=amplitude_range.1);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        x[i] = sign * magnitude;
    }
    Ok(x)
}

/// SNR ceiling: levels above this are treated as noiseless for practical
/// purposes while keeping the arithmetic finite.
pub const SNR_DB_CAP: f64 = 300.0;

/// Adds white Gaussian noise at the given SNR (dB, against mean signal
/// power `‖y‖²/m`) and returns the noisy data with the measured noise norm
/// δ — the measured value, never the nominal variance, drives all
/// discrepancy-principle logic.
pub fn add_awgn(y: &DVector<f64>, snr_db: f64, seed: u64) -> Result<(DVector<f64>, f64)> {
    if y.norm() == 0.0 {
        return Err(Error::InvalidInput("cannot define SNR against zero data".into()));
    }
    let snr = snr_db.min(SNR_DB_CAP);
    let m = y.len() as f64;
    let sigma = ((y.norm_squared() / m) * 10f64.powf(-snr / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = DVector::from_fn(y.len(), |_, _| {
        let g: f64 = rng.sample(StandardNormal);
        sigma * g
    });
    let y_delta = y + &noise;
    Ok((y_delta, noise.norm()))
}

/// Draws the sensing matrix, the sparse truth, clean and noisy data.
///
/// The stored matrix is the raw Gaussian matrix times
/// `min(matrix_scale, 1/‖A_raw‖)`: the cap reproduces the rescaling to unit
/// spectral norm and guarantees the operator's norm bound regardless of the
/// draw.
pub fn gen_cs_problem(cfg: &CsConfig) -> Result<ProblemBundle<CsOperator>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(cfg.seed, 0));
    let raw = DMatrix::from_fn(cfg.m, cfg.n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let raw_norm = spectral_norm(&raw, 200);
    let scale = cfg.matrix_scale.min(1.0 / raw_norm);
    let op = CsOperator::new(raw, cfg.pre_power, cfg.post_power, scale)?;
    let x_true = gen_sparse_signal(cfg.n, cfg.p, cfg.amplitude_range, child_seed(cfg.seed, 1))?;
    let y_clean = op.evaluate(&x_true)?;
    let (y_delta, delta) = add_awgn(&y_clean, cfg.snr_db, child_seed(cfg.seed, 2))?;
    Ok(ProblemBundle {
        op,
        x_true,
        y_clean,
        y_delta,
        delta,
    })
}

/// Builds the two-sphere scene and adds norm-normalized proportional noise:
/// `e = f·‖y_clean‖·g/‖g‖`, so the measured δ equals `f·‖y_clean‖` exactly.
pub fn gen_gravity_problem(cfg: &GravityConfig) -> Result<ProblemBundle<GravityOperator>> {
    cfg.validate()?;
    let spheres = vec![
        Sphere {
            radius: cfg.radii.0,
            density_contrast: cfg.density_contrast,
        },
        Sphere {
            radius: cfg.radii.1,
            density_contrast: cfg.density_contrast,
        },
    ];
    let (a, b) = cfg.station_range;
    let step = (b - a) / (cfg.station_count - 1) as f64;
    let stations: Vec<f64> = (0..cfg.station_count).map(|i| a + step * i as f64).collect();
    let op = GravityOperator::new(spheres, stations)?;
    let x_true = DVector::from_vec(cfg.true_params.clone());
    let y_clean = op.evaluate(&x_true)?;
    let (y_delta, delta) = if cfg.noise_fraction == 0.0 {
        (y_clean.clone(), 0.0)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(cfg.seed, 0));
        let g = DVector::from_fn(y_clean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let delta = cfg.noise_fraction * y_clean.norm();
        let scale = delta / g.norm();
        let e = g * scale;
        (&y_clean + &e, delta)
    };
    Ok(ProblemBundle {
        op,
        x_true,
        y_clean,
        y_delta,
        delta,
    })
}

/// One row of an α-sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    /// Discrepancy norm `G = ‖F(x) − y^δ‖` (not the squared form).
    pub discrepancy: f64,
    pub penalty: f64,
    /// `m(α) = ½G² + αR` at the computed minimizer.
    pub functional: f64,
    /// NaN when no true solution is supplied.
    pub relative_error: f64,
    pub status: String,
    pub optimality_residual: f64,
}

/// One row of a noise-level or Bregman-rate study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRecord {
    pub snr_db: Option<f64>,
    pub noise_fraction: Option<f64>,
    pub seed: u64,
    pub delta: f64,
    pub c_delta: f64,
    pub alpha: f64,
    pub discrepancy: f64,
    pub relative_error: f64,
    pub bregman_distance: Option<f64>,
    pub outcome: String,
}

/// Full result of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub record: StudyRecord,
    pub result: SolverResult,
    pub x_true: DVector<f64>,
    pub delta: f64,
    pub alpha: f64,
    pub c: f64,
    /// The search trace when the α came from the grow/reduce/bisect search.
    pub trace: Option<AlphaSearchTrace>,
}

/// Grid-scan cap of the upper-bound α mode.
const UPPER_BOUND_GRID_CAP: usize = 4000;

/// Chooses α per mode. Upper-bound mode first locates the accepted window
/// via the search, then walks an incremental grid upward and keeps the
/// grid point whose discrepancy is closest to cδ from below-or-equal.
/// `step`: absolute grid increment when given (the documented 0.001 for the
/// CS experiment); otherwise 0.001 times the first α exceeding the window,
/// which keeps the grid resolution proportional on problems whose α scale
/// is many orders of magnitude smaller.
fn choose_alpha(
    problem: &dyn DiscrepancyProblem,
    mdp: &MdpConfig,
    delta: f64,
    mode: AlphaMode,
    step: Option<f64>,
) -> Result<(f64, SolverResult, Option<AlphaSearchTrace>, SearchOutcome)> {
    let search = alpha_search(problem, mdp, delta)?;
    let outcome = search.trace.outcome;
    if mode == AlphaMode::Algorithm1 || outcome != SearchOutcome::Accepted {
        return Ok((search.alpha, search.result, Some(search.trace), outcome));
    }

    let c_delta = mdp.c() * delta;
    // Find an α above the window to size the grid.
    let mut alpha_hi = search.alpha;
    let mut probe = search.result.clone();
    let mut guard = 0;
    while probe.discrepancy <= c_delta {
        guard += 1;
        if guard > 60 {
            break;
        }
        alpha_hi /= mdp.q;
        probe = problem.solve_at(alpha_hi, Some(&probe.x))?;
    }
    let step = step.unwrap_or(0.001 * alpha_hi);

    let mut best_alpha = search.alpha;
    let mut best = search.result;
    let mut warm = best.x.clone();
    for n in 1..=UPPER_BOUND_GRID_CAP {
        let alpha = search.alpha + step * n as f64;
        if alpha > alpha_hi {
            break;
        }
        let r = problem.solve_at(alpha, Some(&warm))?;
        warm = r.x.clone();
        if r.discrepancy > c_delta {
            break;
        }
        if r.discrepancy >= best.discrepancy {
            best_alpha = alpha;
            best = r;
        }
    }
    Ok((best_alpha, best, None, SearchOutcome::Accepted))
}

fn study_record(
    snr_db: Option<f64>,
    noise_fraction: Option<f64>,
    seed: u64,
    delta: f64,
    c: f64,
    alpha: f64,
    result: &SolverResult,
    x_true: &DVector<f64>,
    outcome: SearchOutcome,
) -> Result<StudyRecord> {
    Ok(StudyRecord {
        snr_db,
        noise_fraction,
        seed,
        delta,
        c_delta: c * delta,
        alpha,
        discrepancy: result.discrepancy,
        relative_error: relative_error(&result.x, x_true)?,
        bregman_distance: None,
        outcome: outcome.as_str().into(),
    })
}

/// Documented absolute grid increment of the CS upper-bound scan.
pub const CS_UPPER_BOUND_STEP: f64 = 0.001;

/// Runs the sparse-reconstruction experiment with the ℓ1 solver.
pub fn run_cs_experiment(cfg: &CsConfig, mode: AlphaMode) -> Result<ExperimentRun> {
    let bundle = gen_cs_problem(cfg)?;
    let problem = IstaProblem {
        op: &bundle.op,
        y_delta: bundle.y_delta.clone(),
        cfg: SolverConfig {
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
            ..SolverConfig::default()
        },
    };
    let mdp = cfg.mdp();
    let (alpha, result, trace, outcome) = choose_alpha(
        &problem,
        &mdp,
        bundle.delta,
        mode,
        Some(CS_UPPER_BOUND_STEP),
    )?;
    let record = study_record(
        Some(cfg.snr_db),
        None,
        cfg.seed,
        bundle.delta,
        mdp.c(),
        alpha,
        &result,
        &bundle.x_true,
        outcome,
    )?;
    Ok(ExperimentRun {
        record,
        result,
        x_true: bundle.x_true,
        delta: bundle.delta,
        alpha,
        c: mdp.c(),
        trace,
    })
}

/// Runs the gravity experiment with the Landweber–Tikhonov solver, starting
/// from the configured initial parameter guess.
pub fn run_gravity_experiment(cfg: &GravityConfig, mode: AlphaMode) -> Result<ExperimentRun> {
    let bundle = gen_gravity_problem(cfg)?;
    if bundle.delta == 0.0 {
        return Err(Error::InvalidInput(
            "the discrepancy principle needs a positive noise level".into(),
        ));
    }
    let problem = LandweberProblem {
        op: &bundle.op,
        y_delta: bundle.y_delta.clone(),
        penalty_scaling: DVector::from_element(4, 1.0 / cfg.penalty_scale),
        cfg: SolverConfig {
            max_iterations: cfg.maxiter,
            tolerance: cfg.tolerance,
            step_policy: StepPolicy::Fixed(1.0),
            warm_start: Some(DVector::from_vec(cfg.init_params.clone())),
            record_history: false,
        },
        opts: LandweberOptions::default(),
        chain_warm_starts: false,
    };
    let mdp = cfg.mdp();
    let (alpha, result, trace, outcome) = choose_alpha(&problem, &mdp, bundle.delta, mode, None)?;
    let record = study_record(
        None,
        Some(cfg.noise_fraction),
        cfg.seed,
        bundle.delta,
        mdp.c(),
        alpha,
        &result,
        &bundle.x_true,
        outcome,
    )?;
    Ok(ExperimentRun {
        record,
        result,
        x_true: bundle.x_true,
        delta: bundle.delta,
        alpha,
        c: mdp.c(),
        trace,
    })
}

/// Warm-start policy of an α-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStartPolicy {
    /// Solve in descending-α order, each solve warm-started from the last.
    Chained,
    /// Every α solved from the solver's default initial iterate.
    Cold,
}

/// Solves the problem on each grid α (descending order internally, records
/// returned in ascending order). Per-α failures are recorded in-row and the
/// sweep continues.
pub fn sweep_alpha(
    problem: &dyn DiscrepancyProblem,
    alpha_grid: &[f64],
    policy: WarmStartPolicy,
    x_true: Option<&DVector<f64>>,
) -> Result<Vec<SweepRecord>> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidInput("alpha grid must be nonempty".into()));
    }
    let mut grid = alpha_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if grid.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("alpha grid must be strictly sorted".into()));
    }
    let mut records = Vec::with_capacity(grid.len());
    let mut warm: Option<DVector<f64>> = None;
    for &alpha in &grid {
        match problem.solve_at(alpha, warm.as_ref()) {
            Ok(r) => {
                if policy == WarmStartPolicy::Chained {
                    warm = Some(r.x.clone());
                }
                let rel = match x_true {
                    Some(t) => relative_error(&r.x, t)?,
                    None => f64::NAN,
                };
                records.push(SweepRecord {
                    alpha,
                    discrepancy: r.discrepancy,
                    penalty: r.penalty_value,
                    functional: r.functional_value,
                    relative_error: rel,
                    status: r.status.as_str().into(),
                    optimality_residual: r.optimality_residual,
                });
            }
            Err(e) => records.push(SweepRecord {
                alpha,
                discrepancy: f64::NAN,
                penalty: f64::NAN,
                functional: f64::NAN,
                relative_error: f64::NAN,
                status: format!("error: {e}"),
                optimality_residual: f64::NAN,
            }),
        }
    }
    records.reverse();
    Ok(records)
}

/// Runs the CS experiment once per (SNR, seed) pair; seeds are derived from
/// the template seed by index mixing. Rows are sorted by (SNR, seed); per-run
/// failures are recorded with outcome `"error: …"` and NaN metrics.
pub fn noise_level_study(
    template: &CsConfig,
    snr_list: &[f64],
    seeds_per_level: usize,
    mode: AlphaMode,
) -> Result<Vec<StudyRecord>> {
    if snr_list.is_empty() || seeds_per_level == 0 {
        return Err(Error::InvalidInput("need at least one SNR level and one seed".into()));
    }
    let jobs: Vec<(f64, u64)> = snr_list
        .iter()
        .enumerate()
        .flat_map(|(i, &snr)| {
            (0..seeds_per_level)
                .map(move |j| (snr, child_seed(template.seed, (i * seeds_per_level + j) as u64)))
        })
        .collect();
    let mut records: Vec<StudyRecord> = jobs
        .par_iter()
        .map(|&(snr, seed)| {
            let cfg = CsConfig {
                snr_db: snr,
                seed,
                ..template.clone()
            };
            match run_cs_experiment(&cfg, mode) {
                Ok(run) => run.record,
                Err(e) => StudyRecord {
                    snr_db: Some(snr),
                    noise_fraction: None,
                    seed,
                    delta: f64::NAN,
                    c_delta: f64::NAN,
                    alpha: f64::NAN,
                    discrepancy: f64::NAN,
                    relative_error: f64::NAN,
                    bregman_distance: None,
                    outcome: format!("error: {e}"),
                },
            }
        })
        .collect();
    records.sort_by(|a, b| {
        (a.snr_db.unwrap(), a.seed)
            .partial_cmp(&(b.snr_db.unwrap(), b.seed))
            .unwrap()
    });
    Ok(records)
}

/// Fitted Bregman-rate study: records per noise level plus the least-squares
/// slope and intercept of log d against log δ.
#[derive(Debug, Clone, Serialize)]
pub struct BregmanRateStudy {
    pub records: Vec<StudyRecord>,
    pub slope: f64,
    pub intercept: f64,
    /// (δ, d) pairs actually used in the fit (positive d, positive δ).
    pub fit_points: Vec<(f64, f64)>,
    pub excluded: usize,
}

/// Runs the gravity experiment across noise fractions and fits the decay
/// rate of the Bregman distance d(x̂, x†) against the noise level δ.
/// Rows with d ≤ 0 or δ = 0 are excluded from the fit and counted.
pub fn bregman_rate_study(template: &GravityConfig, noise_fractions: &[f64]) -> Result<BregmanRateStudy> {
    if noise_fractions.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 noise levels".into()));
    }
    let positive: Vec<f64> = noise_fractions.iter().copied().filter(|&f| f > 0.0).collect();
    let span = positive.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / positive.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(span >= 10.0) {
        return Err(Error::InvalidInput(
            "noise levels must span at least a factor of 10".into(),
        ));
    }
    let penalty = QuadraticPenalty::new(DVector::from_element(4, 1.0 / template.penalty_scale))?;
    let x_true = DVector::from_vec(template.true_params.clone());
    let mut records = Vec::new();
    let mut fit_points = Vec::new();
    let mut excluded = 0;
    for (i, &fraction) in noise_fractions.iter().enumerate() {
        if fraction == 0.0 {
            excluded += 1;
            continue;
        }
        let cfg = GravityConfig {
            noise_fraction: fraction,
            seed: child_seed(template.seed, i as u64),
            ..template.clone()
        };
        let run = run_gravity_experiment(&cfg, AlphaMode::Algorithm1)?;
        let d = bregman_distance(&penalty, &run.result.x, &x_true, None)?.distance;
        let mut record = run.record;
        record.bregman_distance = Some(d);
        if d > 0.0 && run.delta > 0.0 {
            fit_points.push((run.delta, d));
        } else {
            excluded += 1;
        }
        records.push(record);
    }
    if fit_points.len() < 2 {
        return Err(Error::EstimationImpossible);
    }
    let n = fit_points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(delta, d) in &fit_points {
        let (lx, ly) = (delta.ln(), d.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Ok(BregmanRateStudy {
        records,
        slope,
        intercept,
        fit_points,
        excluded,
    })
}
