//! Forward operators: the nonlinear compressive-sensing map `x ↦ â(A b̂(x))`,
//! the two-sphere vertical gravity anomaly model, and a plain linear map used
//! as a reference case. Jacobians are hand-coded and finite-difference
//! verified ([`check_jacobian_fd`]).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gravitational constant, m³ kg⁻¹ s⁻².
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674e-11;

/// A Fréchet-differentiable map `F: R^n → R^m` together with the action of
/// its Jacobian and adjoint Jacobian.
///
/// Implementations are immutable after construction and safe to share across
/// threads.
pub trait ForwardOperator: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;

    /// `F(x)`.
    fn evaluate(&self, x: &DVector<f64>) -> Result<DVector<f64>>;

    /// `F'(x) v`.
    fn jacobian_apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>>;

    /// `F'(x)* w`.
    fn jacobian_adjoint_apply(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>>;

    /// Dense Jacobian, assembled column by column. Cheap for the small
    /// parameter spaces used here; override when a direct form is available.
    fn jacobian_matrix(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (m, n) = (self.output_dim(), self.input_dim());
        let mut jac = DMatrix::zeros(m, n);
        let mut e = DVector::zeros(n);
        for i in 0..n {
            e[i] = 1.0;
            let col = self.jacobian_apply(x, &e)?;
            jac.set_column(i, &col);
            e[i] = 0.0;
        }
        Ok(jac)
    }
}

fn check_len(x: &DVector<f64>, expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// Power-iteration estimate of the spectral norm of a dense matrix.
/// Deterministic: starts from the all-ones direction.
pub fn spectral_norm(a: &DMatrix<f64>, iterations: usize) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut sigma = 0.0;
    for _ in 0..iterations {
        let w = a * &v;
        let mut u = a.transpose() * w;
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        u /= norm;
        sigma = norm.sqrt();
        v = u;
    }
    sigma
}

/// Power-iteration estimate of `‖F'(x)‖²` using only Jacobian applications.
pub fn jacobian_norm_sq(op: &dyn ForwardOperator, x: &DVector<f64>, iterations: usize) -> Result<f64> {
    let n = op.input_dim();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w = op.jacobian_apply(x, &v)?;
        let mut u = op.jacobian_adjoint_apply(x, &w)?;
        let norm = u.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        u /= norm;
        lambda = norm;
        v = u;
    }
    Ok(lambda)
}

/// `F(x) = A x`. Mostly used as a zero-nonlinearity reference in tests and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    matrix: DMatrix<f64>,
}

impl LinearOperator {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl ForwardOperator for LinearOperator {
    fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn evaluate(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        Ok(&self.matrix * x)
    }

    fn jacobian_apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        check_len(v, self.input_dim())?;
        Ok(&self.matrix * v)
    }

    fn jacobian_adjoint_apply(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        check_len(w, self.output_dim())?;
        Ok(self.matrix.transpose() * w)
    }

    fn jacobian_matrix(&self, _x: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(self.matrix.clone())
    }
}

/// Nonlinear compressive-sensing operator `F(x) = (A(x + x^d))^c`,
/// both powers taken componentwise. The sensing matrix is stored already
/// multiplied by `scale`, and its spectral norm must not exceed
/// [`CS_NORM_BOUND`] after scaling.
#[derive(Debug, Clone)]
pub struct CsOperator {
    matrix: DMatrix<f64>,
    pre_power: u32,
    post_power: u32,
    raw_norm: f64,
    scaled_norm: f64,
}

/// Upper bound on the spectral norm of the stored (scaled) sensing matrix.
pub const CS_NORM_BOUND: f64 = 1.05;

impl CsOperator {
    /// `raw` is the unscaled sensing matrix; the stored matrix is `scale * raw`.
    pub fn new(raw: DMatrix<f64>, pre_power: u32, post_power: u32, scale: f64) -> Result<Self> {
        if pre_power == 0 || post_power == 0 {
            return Err(Error::InvalidInput(
                "pre_power and post_power must be positive".into(),
            ));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let raw_norm = spectral_norm(&raw, 200);
        let matrix = raw * scale;
        let scaled_norm = raw_norm * scale;
        if scaled_norm > CS_NORM_BOUND {
            return Err(Error::InvalidInput(format!(
                "scaled sensing matrix norm {scaled_norm:.4} exceeds {CS_NORM_BOUND}"
            )));
        }
        Ok(Self {
            matrix,
            pre_power,
            post_power,
            raw_norm,
            scaled_norm,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    pub fn scaled_norm(&self) -> f64 {
        self.scaled_norm
    }

    /// `b̂(x) = x + x^d` componentwise.
    fn pre_map(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|xi| xi + xi.powi(self.pre_power as i32))
    }

    /// `b̂'(x) = 1 + d x^{d-1}` componentwise.
    fn pre_map_derivative(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = self.pre_power as i32;
        x.map(|xi| 1.0 + d as f64 * xi.powi(d - 1))
    }
}

impl ForwardOperator for CsOperator {
    fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn evaluate(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        let z = &self.matrix * self.pre_map(x);
        Ok(z.map(|zi| zi.powi(self.post_power as i32)))
    }

    fn jacobian_apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        check_len(v, self.input_dim())?;
        let inner = v.component_mul(&self.pre_map_derivative(x));
        let mut out = &self.matrix * inner;
        if self.post_power > 1 {
            let c = self.post_power as i32;
            let z = &self.matrix * self.pre_map(x);
            let outer = z.map(|zi| c as f64 * zi.powi(c - 1));
            out = out.component_mul(&outer);
        }
        Ok(out)
    }

    fn jacobian_adjoint_apply(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(x, self.input_dim())?;
        check_len(w, self.output_dim())?;
        let mut wo = w.clone();
        if self.post_power > 1 {
            let c = self.post_power as i32;
            let z = &self.matrix * self.pre_map(x);
            let outer = z.map(|zi| c as f64 * zi.powi(c - 1));
            wo = wo.component_mul(&outer);
        }
        let back = self.matrix.transpose() * wo;
        Ok(back.component_mul(&self.pre_map_derivative(x)))
    }
}

/// One buried sphere of the gravity scene.
#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    /// Radius, meters.
    pub radius: f64,
    /// Density contrast against the host rock, kg/m³.
    pub density_contrast: f64,
}

/// Vertical gravity anomaly of buried spheres observed along a surface line.
///
/// The parameter vector is laid out as `[x0_1, d_1, x0_2, d_2, …]`:
/// horizontal position and depth per sphere, both in meters. All depths must
/// stay strictly positive; the forward model is singular at `d = 0`.
#[derive(Debug, Clone)]
pub struct GravityOperator {
    spheres: Vec<Sphere>,
    stations: Vec<f64>,
    g_const: f64,
}

impl GravityOperator {
    pub fn new(spheres: Vec<Sphere>, stations: Vec<f64>) -> Result<Self> {
        if spheres.is_empty() {
            return Err(Error::InvalidInput("at least one sphere required".into()));
        }
        if stations.is_empty() {
            return Err(Error::InvalidInput("station list must be nonempty".into()));
        }
        if spheres.iter().any(|s| !(s.radius > 0.0)) {
            return Err(Error::InvalidInput("all radii must be positive".into()));
        }
        Ok(Self {
            spheres,
            stations,
            g_const: GRAVITATIONAL_CONSTANT,
        })
    }

    pub fn stations(&self) -> &[f64] {
        &self.stations
    }

    pub fn sphere_count(&self) -> usize {
        self.spheres.len()
    }

    /// `(4π/3) G Δρ R³` for sphere `k`.
    fn coefficient(&self, k: usize) -> f64 {
        let s = &self.spheres[k];
        4.0 * std::f64::consts::PI / 3.0 * self.g_const * s.density_contrast * s.radius.powi(3)
    }

    fn check_params(&self, params: &DVector<f64>) -> Result<()> {
        check_len(params, self.input_dim())?;
        for k in 0..self.spheres.len() {
            let depth = params[2 * k + 1];
            if !(depth > 0.0) {
                return Err(Error::Domain(format!(
                    "sphere {k} depth {depth} is not strictly positive"
                )));
            }
        }
        Ok(())
    }
}

impl ForwardOperator for GravityOperator {
    fn input_dim(&self) -> usize {
        2 * self.spheres.len()
    }

    fn output_dim(&self) -> usize {
        self.stations.len()
    }

    fn evaluate(&self, params: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_params(params)?;
        let mut g = DVector::zeros(self.stations.len());
        for k in 0..self.spheres.len() {
            let (x0, d) = (params[2 * k], params[2 * k + 1]);
            let coef = self.coefficient(k);
            for (i, &xs) in self.stations.iter().enumerate() {
                let r2 = d * d + (xs - x0) * (xs - x0);
                g[i] += coef * d / r2.powf(1.5);
            }
        }
        Ok(g)
    }

    fn jacobian_apply(&self, params: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(v, self.input_dim())?;
        let jac = self.jacobian_matrix(params)?;
        Ok(jac * v)
    }

    fn jacobian_adjoint_apply(&self, params: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(w, self.output_dim())?;
        let jac = self.jacobian_matrix(params)?;
        Ok(jac.transpose() * w)
    }

    fn jacobian_matrix(&self, params: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_params(params)?;
        let mut jac = DMatrix::zeros(self.stations.len(), self.input_dim());
        for k in 0..self.spheres.len() {
            let (x0, d) = (params[2 * k], params[2 * k + 1]);
            let coef = self.coefficient(k);
            for (i, &xs) in self.stations.iter().enumerate() {
                let off = xs - x0;
                let r2 = d * d + off * off;
                let r5 = r2.powf(2.5);
                // ∂g/∂x0 and ∂g/∂d of the single-sphere kernel
                jac[(i, 2 * k)] = coef * d * 3.0 * off / r5;
                jac[(i, 2 * k + 1)] = coef * (off * off - 2.0 * d * d) / r5;
            }
        }
        Ok(jac)
    }
}

/// Finite-difference Jacobian verification report.
#[derive(Debug, Clone)]
pub struct FdReport {
    /// Worst relative column error over all coordinates.
    pub max_rel_error: f64,
    /// Coordinate attaining the worst error.
    pub worst_column: usize,
}

/// Compares `jacobian_apply` columns against central finite differences with
/// step `h_i = 1e-6 · (1 + |x_i|)`.
pub fn check_jacobian_fd(op: &dyn ForwardOperator, x: &DVector<f64>) -> Result<FdReport> {
    let n = op.input_dim();
    let jac = op.jacobian_matrix(x)?;
    let scale = (0..n)
        .map(|i| jac.column(i).norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut max_rel_error = 0.0;
    let mut worst_column = 0;
    for i in 0..n {
        let h = 1e-6 * (1.0 + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (op.evaluate(&xp)? - op.evaluate(&xm)?) / (2.0 * h);
        let col = jac.column(i);
        let denom = col.norm().max(scale * 1e-9);
        let rel = (fd - col).norm() / denom;
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_column = i;
        }
    }
    Ok(FdReport {
        max_rel_error,
        worst_column,
    })
}

/// Relative defect of the adjoint identity `⟨F'(x)v, w⟩ = ⟨v, F'(x)*w⟩`.
pub fn adjoint_identity_error(
    op: &dyn ForwardOperator,
    x: &DVector<f64>,
    v: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<f64> {
    let lhs = op.jacobian_apply(x, v)?.dot(w);
    let rhs = v.dot(&op.jacobian_adjoint_apply(x, w)?);
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
    }

    fn cs_op(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CsOperator {
        let raw = random_matrix(rng, m, n);
        let norm = spectral_norm(&raw, 200);
        CsOperator::new(raw, 3, 1, 0.9 / norm).unwrap()
    }

    #[test]
    fn cs_evaluate_zero_maps_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let op = cs_op(&mut rng, 3, 4);
        let y = op.evaluate(&DVector::zeros(4)).unwrap();
        assert_eq!(y, DVector::zeros(3));
    }

    #[test]
    fn cs_evaluate_unit_vector_gives_twice_column() {
        // 1 + 1³ = 2 with d = 3, c = 1
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let op = cs_op(&mut rng, 3, 4);
        for i in 0..4 {
            let mut e = DVector::zeros(4);
            e[i] = 1.0;
            let y = op.evaluate(&e).unwrap();
            let expected = op.matrix().column(i) * 2.0;
            assert!((y - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn cs_evaluate_matches_direct_arithmetic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = cs_op(&mut rng, 3, 4);
        let x = random_vector(&mut rng, 4);
        let y = op.evaluate(&x).unwrap();
        // brute-force componentwise A(x + x³)
        for i in 0..3 {
            let mut yi = 0.0;
            for j in 0..4 {
                yi += op.matrix()[(i, j)] * (x[j] + x[j] * x[j] * x[j]);
            }
            assert!((y[i] - yi).abs() <= 1e-12 * (1.0 + yi.abs()));
        }
    }

    #[test]
    fn cs_evaluate_rejects_dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = cs_op(&mut rng, 3, 4);
        let err = op.evaluate(&DVector::zeros(5)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 4, got: 5 }));
    }

    #[test]
    fn cs_adjoint_at_zero_is_matrix_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = cs_op(&mut rng, 3, 4);
        let w = random_vector(&mut rng, 3);
        let got = op.jacobian_adjoint_apply(&DVector::zeros(4), &w).unwrap();
        let expected = op.matrix().transpose() * &w;
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn cs_adjoint_identity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let op = cs_op(&mut rng, 3, 5);
        for _ in 0..100 {
            let x = random_vector(&mut rng, 5);
            let v = random_vector(&mut rng, 5);
            let w = random_vector(&mut rng, 3);
            assert!(adjoint_identity_error(&op, &x, &v, &w).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn cs_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let op = cs_op(&mut rng, 3, 5);
        let x = random_vector(&mut rng, 5);
        let report = check_jacobian_fd(&op, &x).unwrap();
        assert!(report.max_rel_error < 1e-5, "{report:?}");
    }

    #[test]
    fn cs_higher_post_power_jacobian_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let raw = random_matrix(&mut rng, 3, 5);
        let norm = spectral_norm(&raw, 200);
        let op = CsOperator::new(raw, 3, 2, 0.9 / norm).unwrap();
        let x = random_vector(&mut rng, 5);
        let report = check_jacobian_fd(&op, &x).unwrap();
        assert!(report.max_rel_error < 1e-5, "{report:?}");
        let v = random_vector(&mut rng, 5);
        let w = random_vector(&mut rng, 3);
        assert!(adjoint_identity_error(&op, &x, &v, &w).unwrap() <= 1e-10);
    }

    #[test]
    fn cs_scale_linearity_with_identity_post_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw = random_matrix(&mut rng, 3, 4);
        let norm = spectral_norm(&raw, 200);
        let s = 0.5 / norm;
        let op1 = CsOperator::new(raw.clone(), 3, 1, s).unwrap();
        let op2 = CsOperator::new(raw, 3, 1, 2.0 * s).unwrap();
        let x = random_vector(&mut rng, 4);
        let y1 = op1.evaluate(&x).unwrap();
        let y2 = op2.evaluate(&x).unwrap();
        assert!((y2 - y1 * 2.0).norm() < 1e-13);
    }

    #[test]
    fn cs_rejects_overscaled_matrix() {
        let raw = DMatrix::identity(3, 3) * 10.0;
        assert!(CsOperator::new(raw, 3, 1, 1.0).is_err());
    }

    fn benchmark_gravity() -> GravityOperator {
        let spheres = vec![
            Sphere { radius: 100.0, density_contrast: 300.0 },
            Sphere { radius: 100.0, density_contrast: 300.0 },
        ];
        let stations: Vec<f64> = (0..50)
            .map(|i| -500.0 + 1000.0 * i as f64 / 49.0)
            .collect();
        GravityOperator::new(spheres, stations).unwrap()
    }

    #[test]
    fn gravity_single_sphere_peak_value() {
        let op = GravityOperator::new(
            vec![Sphere { radius: 100.0, density_contrast: 300.0 }],
            vec![0.0],
        )
        .unwrap();
        let g = op.evaluate(&DVector::from_vec(vec![0.0, 150.0])).unwrap();
        // (4π/3)·G·Δρ·R³/d² at zero offset
        let expected = 4.0 * std::f64::consts::PI / 3.0 * 6.674e-11 * 300.0 * 1e6 / 150.0_f64.powi(2);
        assert!((g[0] - expected).abs() < 1e-18);
        assert!((expected - 3.7275e-6).abs() < 1e-10);
    }

    #[test]
    fn gravity_is_symmetric_about_sphere_position() {
        let op = GravityOperator::new(
            vec![Sphere { radius: 100.0, density_contrast: 300.0 }],
            vec![-80.0, 120.0],
        )
        .unwrap();
        // stations at x0 ± 100
        let g = op.evaluate(&DVector::from_vec(vec![20.0, 150.0])).unwrap();
        assert!((g[0] - g[1]).abs() < 1e-20);
    }

    #[test]
    fn gravity_two_spheres_sum_pointwise() {
        let op = benchmark_gravity();
        let params = DVector::from_vec(vec![-200.0, 150.0, 200.0, 200.0]);
        let total = op.evaluate(&params).unwrap();
        let single = GravityOperator::new(
            vec![Sphere { radius: 100.0, density_contrast: 300.0 }],
            op.stations().to_vec(),
        )
        .unwrap();
        let g1 = single.evaluate(&DVector::from_vec(vec![-200.0, 150.0])).unwrap();
        let g2 = single.evaluate(&DVector::from_vec(vec![200.0, 200.0])).unwrap();
        assert!((total - (g1 + g2)).norm() < 1e-20);
    }

    #[test]
    fn gravity_sphere_relabeling_invariance() {
        let op = benchmark_gravity();
        let a = op.evaluate(&DVector::from_vec(vec![-200.0, 150.0, 200.0, 200.0])).unwrap();
        let b = op.evaluate(&DVector::from_vec(vec![200.0, 200.0, -200.0, 150.0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gravity_rejects_nonpositive_depth() {
        let op = benchmark_gravity();
        let err = op
            .evaluate(&DVector::from_vec(vec![-200.0, -5.0, 200.0, 200.0]))
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn gravity_jacobian_at_station_above_sphere() {
        let op = GravityOperator::new(
            vec![Sphere { radius: 100.0, density_contrast: 300.0 }],
            vec![-200.0],
        )
        .unwrap();
        let jac = op
            .jacobian_matrix(&DVector::from_vec(vec![-200.0, 150.0]))
            .unwrap();
        // odd offset factor vanishes
        assert_eq!(jac[(0, 0)], 0.0);
        // ∂g/∂d = −2·(4π/3)GΔρR³/d³ at zero offset
        let coef = 4.0 * std::f64::consts::PI / 3.0 * 6.674e-11 * 300.0 * 1e6;
        let expected = -2.0 * coef / 150.0_f64.powi(3);
        assert!((jac[(0, 1)] - expected).abs() < 1e-20 + 1e-12 * expected.abs());
        assert!(expected < 0.0);
    }

    #[test]
    fn gravity_jacobian_matches_finite_differences_at_truth() {
        let op = benchmark_gravity();
        let report = check_jacobian_fd(&op, &DVector::from_vec(vec![-200.0, 150.0, 200.0, 200.0])).unwrap();
        assert!(report.max_rel_error < 1e-5, "{report:?}");
    }

    #[test]
    fn gravity_jacobian_matches_finite_differences_at_initial_guess() {
        let op = benchmark_gravity();
        let report = check_jacobian_fd(&op, &DVector::from_vec(vec![-150.0, 100.0, 150.0, 250.0])).unwrap();
        assert!(report.max_rel_error < 1e-5, "{report:?}");
    }

    #[test]
    fn gravity_adjoint_identity_on_random_triples() {
        let op = benchmark_gravity();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let x = DVector::from_vec(vec![
                rng.gen_range(-300.0..300.0),
                rng.gen_range(50.0..400.0),
                rng.gen_range(-300.0..300.0),
                rng.gen_range(50.0..400.0),
            ]);
            let v = random_vector(&mut rng, 4);
            let w = random_vector(&mut rng, 50);
            assert!(adjoint_identity_error(&op, &x, &v, &w).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn linear_operator_fd_error_is_roundoff_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 4, 3);
        let op = LinearOperator::new(a);
        let x = random_vector(&mut rng, 3);
        let report = check_jacobian_fd(&op, &x).unwrap();
        assert!(report.max_rel_error < 1e-9, "{report:?}");
    }

    #[test]
    fn forward_evaluations_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let op = cs_op(&mut rng, 3, 4);
        let x = random_vector(&mut rng, 4);
        let a = op.evaluate(&x).unwrap();
        let b = op.evaluate(&x).unwrap();
        assert_eq!(a, b);
    }
}
