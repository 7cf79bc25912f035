//! The widened Morozov discrepancy principle: the constant
//! `c = max{τ2, (3+2γ)τ1}`, window classification, the geometric-reduction +
//! bisection search for α, an empirical tangential-cone constant estimator,
//! the data-condition check, and the classical-window gap detector.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::SweepRecord;
use crate::operators::ForwardOperator;
use crate::problem::DiscrepancyProblem;
use crate::solvers::SolverResult;

/// `c = max{τ2, (3+2γ)τ1}`, the widened upper-window factor whose
/// nonemptiness along the α-path is guaranteed.
pub fn compute_c(tau1: f64, tau2: f64, gamma: f64) -> Result<f64> {
    if !(tau1 >= 1.0) {
        return Err(Error::InvalidInput("tau1 must satisfy tau1 >= 1".into()));
    }
    if !(tau2 > tau1) {
        return Err(Error::InvalidInput("tau2 must satisfy tau2 > tau1".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    Ok(tau2.max((3.0 + 2.0 * gamma) * tau1))
}

/// Discrepancy-principle parameters and the controls of the α search.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MdpConfig {
    pub tau1: f64,
    pub tau2: f64,
    /// Tangential-cone constant used in `c`; a config input, not an
    /// automatically estimated quantity.
    pub gamma: f64,
    /// Geometric reduction factor of the α search.
    pub q: f64,
    /// Initial regularization parameter.
    pub alpha0: f64,
    /// Per-phase step cap of the search.
    pub max_search_steps: usize,
    /// Relative bracket width below which bisection gives up.
    pub bracket_rel_tol: f64,
}

impl Default for MdpConfig {
    fn default() -> Self {
        Self {
            tau1: 1.0,
            tau2: 2.0,
            gamma: 0.5,
            q: 0.5,
            alpha0: 1.0,
            max_search_steps: 60,
            bracket_rel_tol: 1e-3,
        }
    }
}

impl MdpConfig {
    pub fn validate(&self) -> Result<()> {
        compute_c(self.tau1, self.tau2, self.gamma)?;
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidInput("q must lie in (0, 1)".into()));
        }
        if !(self.alpha0 > 0.0) {
            return Err(Error::InvalidInput("alpha0 must be positive".into()));
        }
        if !(self.bracket_rel_tol > 0.0) {
            return Err(Error::InvalidInput("bracket_rel_tol must be positive".into()));
        }
        if self.max_search_steps == 0 {
            return Err(Error::InvalidInput("max_search_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn c(&self) -> f64 {
        // validated configs cannot fail here
        compute_c(self.tau1, self.tau2, self.gamma).expect("invalid MdpConfig")
    }
}

/// Where a discrepancy value falls relative to the classical window
/// `[τ1δ, τ2δ]` and the widened window `[τ1δ, cδ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowClass {
    Below,
    InsideClassical,
    InsideWidened,
    Above,
}

/// Classifies a discrepancy against both windows (closed intervals).
pub fn mdp_window_check(discrepancy: f64, delta: f64, cfg: &MdpConfig) -> WindowClass {
    let lo = cfg.tau1 * delta;
    if discrepancy < lo {
        WindowClass::Below
    } else if discrepancy <= cfg.tau2 * delta {
        WindowClass::InsideClassical
    } else if discrepancy <= cfg.c() * delta {
        WindowClass::InsideWidened
    } else {
        WindowClass::Above
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchPhase {
    Grow,
    Reduce,
    Bisect,
}

impl SearchPhase {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchPhase::Grow => "grow",
            SearchPhase::Reduce => "reduce",
            SearchPhase::Bisect => "bisect",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub step: usize,
    pub phase: SearchPhase,
    pub alpha: f64,
    pub discrepancy: f64,
    pub penalty: f64,
    pub functional: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Accepted,
    BracketCollapsed,
    StepCap,
}

impl SearchOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchOutcome::Accepted => "accepted",
            SearchOutcome::BracketCollapsed => "bracket-collapsed",
            SearchOutcome::StepCap => "step-cap",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlphaSearchTrace {
    pub steps: Vec<TraceStep>,
    /// Final `(α_min, α_max)` bracket when one was formed.
    pub bracket: Option<(f64, f64)>,
    pub outcome: SearchOutcome,
    /// Set by callers when the data condition failed before the search.
    pub data_condition_warning: Option<String>,
}

/// Result of the α search: the final parameter, the solve at that parameter,
/// and the full audit trace. On `BracketCollapsed`/`StepCap` the carried
/// solve is the last one attempted.
#[derive(Debug, Clone)]
pub struct AlphaSearch {
    pub alpha: f64,
    pub result: SolverResult,
    pub trace: AlphaSearchTrace,
}

impl AlphaSearch {
    pub fn accepted(&self) -> bool {
        self.trace.outcome == SearchOutcome::Accepted
    }
}

/// Grow-phase cap (α0/q^60 at most) before giving up with `StepCap`.
const GROW_CAP: usize = 60;

/// Searches for α with `τ1δ ≤ ‖F(x_α) − y^δ‖ ≤ cδ`.
///
/// Phase order: grow α geometrically while the discrepancy is still below
/// the widened window, reduce by the factor `q` while it is above, then
/// bisect the bracket formed by the last too-large and first too-small α.
/// Every solve is warm-started from the nearest previously solved α (in log
/// distance); acceptance is tested at every solve.
pub fn alpha_search(
    problem: &dyn DiscrepancyProblem,
    cfg: &MdpConfig,
    delta: f64,
) -> Result<AlphaSearch> {
    cfg.validate()?;
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    let lo = cfg.tau1 * delta;
    let hi = cfg.c() * delta;

    let mut steps: Vec<TraceStep> = Vec::new();
    let mut solutions: Vec<(f64, DVector<f64>)> = Vec::new();

    let solve = |alpha: f64,
                     phase: SearchPhase,
                     steps: &mut Vec<TraceStep>,
                     solutions: &mut Vec<(f64, DVector<f64>)>|
     -> Result<SolverResult> {
        let warm = solutions
            .iter()
            .min_by(|a, b| {
                let da = (a.0.ln() - alpha.ln()).abs();
                let db = (b.0.ln() - alpha.ln()).abs();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(_, x)| x.clone());
        let result = problem.solve_at(alpha, warm.as_ref())?;
        steps.push(TraceStep {
            step: steps.len(),
            phase,
            alpha,
            discrepancy: result.discrepancy,
            penalty: result.penalty_value,
            functional: result.functional_value,
        });
        solutions.push((alpha, result.x.clone()));
        Ok(result)
    };

    let finish = |alpha: f64,
                  result: SolverResult,
                  outcome: SearchOutcome,
                  steps: Vec<TraceStep>,
                  bracket: Option<(f64, f64)>| AlphaSearch {
        alpha,
        result,
        trace: AlphaSearchTrace {
            steps,
            bracket,
            outcome,
            data_condition_warning: None,
        },
    };

    // Phase 0: grow until the discrepancy leaves the window from above
    // (or accept if we are already inside).
    let mut alpha = cfg.alpha0;
    let mut result = solve(alpha, SearchPhase::Grow, &mut steps, &mut solutions)?;
    let mut grow_steps = 0;
    while result.discrepancy <= hi {
        if result.discrepancy >= lo {
            return Ok(finish(alpha, result, SearchOutcome::Accepted, steps, None));
        }
        grow_steps += 1;
        if grow_steps > GROW_CAP {
            return Ok(finish(alpha, result, SearchOutcome::StepCap, steps, None));
        }
        alpha /= cfg.q;
        result = solve(alpha, SearchPhase::Grow, &mut steps, &mut solutions)?;
    }

    // Phase 1: geometric reduction while the discrepancy exceeds cδ.
    let mut alpha_max = alpha;
    let mut alpha_min;
    let mut reduce_steps = 0;
    loop {
        reduce_steps += 1;
        if reduce_steps > cfg.max_search_steps {
            return Ok(finish(alpha, result, SearchOutcome::StepCap, steps, None));
        }
        alpha *= cfg.q;
        result = solve(alpha, SearchPhase::Reduce, &mut steps, &mut solutions)?;
        if result.discrepancy > hi {
            alpha_max = alpha;
            continue;
        }
        if result.discrepancy >= lo {
            return Ok(finish(alpha, result, SearchOutcome::Accepted, steps, None));
        }
        alpha_min = alpha;
        break;
    }

    // Phase 2: bisection on the bracket.
    let mut bisect_steps = 0;
    loop {
        if (alpha_max - alpha_min) / alpha_max < cfg.bracket_rel_tol {
            return Ok(finish(
                alpha,
                result,
                SearchOutcome::BracketCollapsed,
                steps,
                Some((alpha_min, alpha_max)),
            ));
        }
        bisect_steps += 1;
        if bisect_steps > cfg.max_search_steps {
            return Ok(finish(
                alpha,
                result,
                SearchOutcome::StepCap,
                steps,
                Some((alpha_min, alpha_max)),
            ));
        }
        alpha = 0.5 * (alpha_min + alpha_max);
        result = solve(alpha, SearchPhase::Bisect, &mut steps, &mut solutions)?;
        if result.discrepancy > hi {
            alpha_max = alpha;
        } else if result.discrepancy < lo {
            alpha_min = alpha;
        } else {
            return Ok(finish(
                alpha,
                result,
                SearchOutcome::Accepted,
                steps,
                Some((alpha_min, alpha_max)),
            ));
        }
    }
}

/// Empirical tangential-cone constant.
#[derive(Debug, Clone)]
pub struct GammaEstimate {
    pub gamma_hat: f64,
    /// Anchor indices of the pair attaining the maximum ratio.
    pub worst_pair: (usize, usize),
    pub pairs_used: usize,
    pub pairs_skipped: usize,
}

/// Estimates γ as the maximum over sampled anchor pairs of
/// `‖F(x2) − F(x1) − F'(x1)(x2 − x1)‖ / ‖F(x2) − F(x1)‖`.
///
/// Pairs are drawn sequentially from the seeded stream, so a larger
/// `pair_samples` with the same seed samples a superset and the estimate is
/// nondecreasing. Pairs with `‖F(x2) − F(x1)‖ < 1e-12` are skipped.
pub fn estimate_gamma(
    op: &dyn ForwardOperator,
    anchor_points: &[DVector<f64>],
    pair_samples: usize,
    seed: u64,
) -> Result<GammaEstimate> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    if anchor_points.len() < 2 {
        return Err(Error::InvalidInput("at least two anchor points required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma_hat = f64::NEG_INFINITY;
    let mut worst_pair = (0, 0);
    let mut pairs_used = 0;
    let mut pairs_skipped = 0;
    for _ in 0..pair_samples {
        let i = rng.gen_range(0..anchor_points.len());
        let mut j = rng.gen_range(0..anchor_points.len() - 1);
        if j >= i {
            j += 1;
        }
        let (x1, x2) = (&anchor_points[i], &anchor_points[j]);
        let f1 = op.evaluate(x1)?;
        let f2 = op.evaluate(x2)?;
        let df = &f2 - &f1;
        let denom = df.norm();
        if denom < 1e-12 {
            pairs_skipped += 1;
            continue;
        }
        let remainder = (&df - op.jacobian_apply(x1, &(x2 - x1))?).norm();
        let ratio = remainder / denom;
        if ratio > gamma_hat {
            gamma_hat = ratio;
            worst_pair = (i, j);
        }
        pairs_used += 1;
    }
    if pairs_used == 0 {
        return Err(Error::EstimationImpossible);
    }
    Ok(GammaEstimate {
        gamma_hat,
        worst_pair,
        pairs_used,
        pairs_skipped,
    })
}

/// Result of the data-condition check `‖y − y^δ‖ ≤ τ1δ < τ2δ ≤ ‖F(0) − y^δ‖`.
#[derive(Debug, Clone, Serialize)]
pub struct DataConditionReport {
    /// `τ2δ`.
    pub lhs: f64,
    /// `‖F(0) − y^δ‖` (zero-model baseline when `F(0)` is outside the domain).
    pub rhs: f64,
    /// Whether the upper half `τ2δ ≤ rhs` holds.
    pub satisfied: bool,
    /// The `‖y − y^δ‖ ≤ τ1δ` half, checkable only with clean data.
    pub noise_half: Option<bool>,
}

/// Checks the data condition. The `‖y − y^δ‖ ≤ τ1δ` half is verified when
/// clean data is supplied (synthetic experiments). When `F(0)` is not in the
/// operator's domain (gravity: zero depth), the zero-anomaly baseline `0` is
/// used in its place.
pub fn verify_data_condition(
    op: &dyn ForwardOperator,
    y_delta: &DVector<f64>,
    delta: f64,
    tau1: f64,
    tau2: f64,
    y_clean: Option<&DVector<f64>>,
) -> Result<DataConditionReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    let zero = DVector::zeros(op.input_dim());
    let baseline = match op.evaluate(&zero) {
        Ok(f0) => f0,
        Err(Error::Domain(_)) => DVector::zeros(op.output_dim()),
        Err(e) => return Err(e),
    };
    let rhs = (baseline - y_delta).norm();
    let lhs = tau2 * delta;
    let noise_half = y_clean.map(|y| (y - y_delta).norm() <= tau1 * delta);
    Ok(DataConditionReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs && noise_half.unwrap_or(true),
        noise_half,
    })
}

/// Evidence report on the classical-vs-widened window phenomenon over a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    /// Any sweep point with discrepancy in `[τ1δ, τ2δ]`.
    pub classical_hit: bool,
    /// Any sweep point with discrepancy in `[τ1δ, cδ]`.
    pub widened_hit: bool,
    /// Largest discrepancy jump between adjacent α grid points.
    pub largest_jump: f64,
    /// The adjacent α pair attaining that jump.
    pub jump_between: (f64, f64),
}

/// Scans a sweep (sorted by α) for classical- and widened-window hits, and
/// for the largest discrepancy jump between adjacent grid points — the
/// discontinuity evidence behind the widened bound.
pub fn classical_gap_report(sweep: &[SweepRecord], delta: f64, cfg: &MdpConfig) -> Result<GapReport> {
    if sweep.is_empty() {
        return Err(Error::InvalidInput("sweep must be nonempty".into()));
    }
    let lo = cfg.tau1 * delta;
    let classical_hi = cfg.tau2 * delta;
    let widened_hi = cfg.c() * delta;
    let mut classical_hit = false;
    let mut widened_hit = false;
    for rec in sweep {
        let d = rec.discrepancy;
        if d >= lo && d <= classical_hi {
            classical_hit = true;
        }
        if d >= lo && d <= widened_hi {
            widened_hit = true;
        }
    }
    let mut largest_jump = 0.0;
    let mut jump_between = (sweep[0].alpha, sweep[0].alpha);
    for w in sweep.windows(2) {
        let jump = (w[1].discrepancy - w[0].discrepancy).abs();
        if jump > largest_jump {
            largest_jump = jump;
            jump_between = (w[0].alpha, w[1].alpha);
        }
    }
    Ok(GapReport {
        classical_hit,
        widened_hit,
        largest_jump,
        jump_between,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SweepRecord;
    use crate::operators::LinearOperator;
    use crate::problem::ScalarLasso;
    use nalgebra::DMatrix;

    #[test]
    fn compute_c_reference_values() {
        assert_eq!(compute_c(1.0, 2.0, 0.5).unwrap(), 4.0);
        assert!((compute_c(1.102, 2.771, 0.5).unwrap() - 4.408).abs() < 1e-12);
        assert_eq!(compute_c(1.0, 10.0, 0.5).unwrap(), 10.0);
    }

    #[test]
    fn compute_c_rejects_bad_parameters() {
        assert!(compute_c(0.5, 2.0, 0.5).is_err());
        assert!(compute_c(1.0, 1.0, 0.5).is_err());
        assert!(compute_c(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn compute_c_is_monotone_in_each_argument() {
        let base = compute_c(1.1, 2.0, 0.5).unwrap();
        assert!(compute_c(1.2, 2.0, 0.5).unwrap() >= base);
        assert!(compute_c(1.1, 2.5, 0.5).unwrap() >= base);
        assert!(compute_c(1.1, 2.0, 0.9).unwrap() >= base);
    }

    #[test]
    fn window_check_boundary_and_widened_cases() {
        let cfg = MdpConfig::default(); // τ1=1, τ2=2, c=4
        let delta = 0.2903;
        assert_eq!(mdp_window_check(delta, delta, &cfg), WindowClass::InsideClassical);
        assert_eq!(mdp_window_check(1.0, delta, &cfg), WindowClass::InsideWidened);
        assert_eq!(mdp_window_check(2.0 * 4.0 * delta, delta, &cfg), WindowClass::Above);
        assert_eq!(mdp_window_check(0.1 * delta, delta, &cfg), WindowClass::Below);
    }

    #[test]
    fn alpha_search_scalar_lasso_accepts_in_window() {
        let cfg = MdpConfig::default();
        let search = alpha_search(&ScalarLasso::default(), &cfg, 0.2).unwrap();
        assert!(search.accepted());
        let d = search.result.discrepancy;
        assert!((0.2..=0.8).contains(&d), "discrepancy {d}");
        // accepts on the first α entering the window
        let inside = search
            .trace
            .steps
            .iter()
            .position(|s| s.discrepancy >= 0.2 && s.discrepancy <= 0.8)
            .unwrap();
        assert_eq!(inside, search.trace.steps.len() - 1);
    }

    #[test]
    fn alpha_search_accepts_immediately_when_alpha0_inside() {
        let cfg = MdpConfig {
            alpha0: 0.5,
            ..MdpConfig::default()
        };
        let search = alpha_search(&ScalarLasso::default(), &cfg, 0.2).unwrap();
        assert!(search.accepted());
        assert_eq!(search.trace.steps.len(), 1);
        assert_eq!(search.alpha, 0.5);
    }

    #[test]
    fn alpha_search_reduce_steps_multiply_by_q() {
        let cfg = MdpConfig {
            alpha0: 100.0,
            q: 0.5,
            ..MdpConfig::default()
        };
        let search = alpha_search(&ScalarLasso::default(), &cfg, 0.1).unwrap();
        let steps = &search.trace.steps;
        for w in steps.windows(2) {
            if w[1].phase == SearchPhase::Reduce {
                assert!((w[1].alpha - 0.5 * w[0].alpha).abs() < 1e-15);
            }
        }
        assert!(search.accepted());
    }

    #[test]
    fn alpha_search_acceptance_lands_in_window() {
        let cfg = MdpConfig::default();
        for delta in [0.05, 0.1, 0.2] {
            let search = alpha_search(&ScalarLasso::default(), &cfg, delta).unwrap();
            assert!(search.accepted());
            let class = mdp_window_check(search.result.discrepancy, delta, &cfg);
            assert!(matches!(
                class,
                WindowClass::InsideClassical | WindowClass::InsideWidened
            ));
        }
    }

    /// Scalar quadratic operator F(x) = x² for hand-checkable γ ratios.
    struct Square;
    impl ForwardOperator for Square {
        fn input_dim(&self) -> usize {
            1
        }
        fn output_dim(&self) -> usize {
            1
        }
        fn evaluate(&self, x: &DVector<f64>) -> crate::error::Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![x[0] * x[0]]))
        }
        fn jacobian_apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> crate::error::Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![2.0 * x[0] * v[0]]))
        }
        fn jacobian_adjoint_apply(&self, x: &DVector<f64>, w: &DVector<f64>) -> crate::error::Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![2.0 * x[0] * w[0]]))
        }
    }

    #[test]
    fn estimate_gamma_is_zero_for_linear_operator() {
        let op = LinearOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 0.5]));
        let anchors: Vec<DVector<f64>> = (0..10)
            .map(|i| DVector::from_vec(vec![i as f64, 1.0 - i as f64]))
            .collect();
        let est = estimate_gamma(&op, &anchors, 200, 7).unwrap();
        assert!(est.gamma_hat <= 1e-12, "{}", est.gamma_hat);
    }

    #[test]
    fn estimate_gamma_matches_hand_computed_square_ratio() {
        // x1=1, x2=2: remainder (x2−x1)² = 1, ‖F2−F1‖ = 3, ratio 1/3
        let anchors = vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![2.0])];
        let est = estimate_gamma(&Square, &anchors, 50, 3).unwrap();
        assert!((est.gamma_hat - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_gamma_nondecreasing_in_sample_count() {
        let op = Square;
        let anchors: Vec<DVector<f64>> = (1..30).map(|i| DVector::from_vec(vec![0.1 * i as f64])).collect();
        let small = estimate_gamma(&op, &anchors, 50, 11).unwrap();
        let large = estimate_gamma(&op, &anchors, 500, 11).unwrap();
        assert!(large.gamma_hat >= small.gamma_hat);
    }

    #[test]
    fn estimate_gamma_errors_when_all_pairs_degenerate() {
        let op = Square;
        // F(−x) = F(x): all pairs map to identical data
        let anchors = vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])];
        assert!(matches!(
            estimate_gamma(&op, &anchors, 20, 5),
            Err(Error::EstimationImpossible)
        ));
    }

    #[test]
    fn data_condition_degenerate_data_unsatisfied() {
        let op = LinearOperator::new(DMatrix::identity(2, 2));
        let y_delta = DVector::zeros(2); // equals F(0)
        let report = verify_data_condition(&op, &y_delta, 0.1, 1.0, 2.0, None).unwrap();
        assert!(!report.satisfied);
        assert_eq!(report.rhs, 0.0);
    }

    #[test]
    fn data_condition_noise_half_with_clean_data() {
        let op = LinearOperator::new(DMatrix::identity(2, 2));
        let y = DVector::from_vec(vec![10.0, 0.0]);
        let y_delta = DVector::from_vec(vec![10.05, 0.0]);
        let delta = (&y - &y_delta).norm();
        let report = verify_data_condition(&op, &y_delta, delta, 1.0, 2.0, Some(&y)).unwrap();
        assert!(report.satisfied);
        assert_eq!(report.noise_half, Some(true));
    }

    fn record(alpha: f64, discrepancy: f64) -> SweepRecord {
        SweepRecord {
            alpha,
            discrepancy,
            penalty: 0.0,
            functional: 0.5 * discrepancy * discrepancy,
            relative_error: 0.0,
            status: "converged".into(),
            optimality_residual: 0.0,
        }
    }

    #[test]
    fn gap_report_rejects_empty_sweep() {
        assert!(classical_gap_report(&[], 0.1, &MdpConfig::default()).is_err());
    }

    #[test]
    fn gap_report_continuous_sweep_hits_classical_window() {
        let cfg = MdpConfig::default();
        let delta = 0.15;
        let sweep: Vec<SweepRecord> = (1..=10)
            .map(|j| {
                let alpha = 0.1 * j as f64;
                record(alpha, alpha.min(1.0))
            })
            .collect();
        let report = classical_gap_report(&sweep, delta, &cfg).unwrap();
        assert!(report.classical_hit);
        assert!(report.widened_hit);
    }

    #[test]
    fn gap_report_all_above_still_reports_jump() {
        let cfg = MdpConfig::default();
        let sweep = vec![record(0.1, 10.0), record(0.2, 14.0), record(0.4, 15.0)];
        let report = classical_gap_report(&sweep, 0.01, &cfg).unwrap();
        assert!(!report.classical_hit && !report.widened_hit);
        assert!((report.largest_jump - 4.0).abs() < 1e-15);
        assert_eq!(report.jump_between, (0.1, 0.2));
    }

    #[test]
    fn window_monotonicity_classical_implies_widened() {
        let cfg = MdpConfig::default();
        let delta = 0.3;
        for d in [0.3, 0.45, 0.6] {
            let class = mdp_window_check(d, delta, &cfg);
            assert_eq!(class, WindowClass::InsideClassical);
            // c ≥ τ2 so the widened window contains the classical one
            assert!(d <= cfg.c() * delta);
        }
    }

    #[test]
    fn scalar_oracle_exhaustive_grid_never_fails() {
        let deltas: Vec<f64> = (1..=24).map(|k| 0.01 * k as f64).collect();
        let alpha0s: Vec<f64> = (-3..=3).map(|e| 10.0_f64.powi(e)).collect();
        let qs = [0.3, 0.5, 0.7];
        for &delta in &deltas {
            for &alpha0 in &alpha0s {
                for &q in &qs {
                    let cfg = MdpConfig {
                        alpha0,
                        q,
                        ..MdpConfig::default()
                    };
                    let search = alpha_search(&ScalarLasso::default(), &cfg, delta).unwrap();
                    assert!(
                        search.accepted(),
                        "failed at delta={delta} alpha0={alpha0} q={q}: {:?}",
                        search.trace.outcome
                    );
                    let d = search.result.discrepancy;
                    assert!(d >= cfg.tau1 * delta && d <= cfg.c() * delta);
                }
            }
        }
    }
}
