//! Convex penalties: the ℓ1 norm and a diagonally scaled quadratic, with
//! their proximal maps, subgradient selection rules, and the Bregman
//! distance used by the convergence-rate diagnostics.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A convex penalty `R` with `R(0) = 0`, a proximal map, and a documented
/// subgradient selection rule.
pub trait Penalty: Sync {
    /// `R(x)`.
    fn value(&self, x: &DVector<f64>) -> f64;

    /// `argmin_x ½‖x − v‖² + t·R(x)` for `t ≥ 0`.
    fn prox(&self, v: &DVector<f64>, t: f64) -> Result<DVector<f64>>;

    /// One element of `∂R(x)` under the penalty's selection rule.
    fn subgradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// `R(x) = Σ|x_i|`.
///
/// Subgradient selection: `ξ_i = sign(x_i)` where `x_i ≠ 0`, else `0`
/// (the minimal-norm element of the subdifferential).
#[derive(Debug, Clone, Copy, Default)]
pub struct L1Penalty;

impl Penalty for L1Penalty {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|xi| xi.abs()).sum()
    }

    fn prox(&self, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        soft_threshold(v, t)
    }

    fn subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|xi| if xi == 0.0 { 0.0 } else { xi.signum() })
    }
}

/// `R(x) = ½‖Dx‖²` with a positive diagonal `D`.
#[derive(Debug, Clone)]
pub struct QuadraticPenalty {
    scaling: DVector<f64>,
}

impl QuadraticPenalty {
    pub fn new(scaling: DVector<f64>) -> Result<Self> {
        if scaling.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidInput(
                "quadratic penalty scaling must be strictly positive".into(),
            ));
        }
        Ok(Self { scaling })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            scaling: DVector::from_element(n, 1.0),
        }
    }

    pub fn scaling(&self) -> &DVector<f64> {
        &self.scaling
    }
}

impl Penalty for QuadraticPenalty {
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.component_mul(&self.scaling).norm_squared()
    }

    fn prox(&self, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        if t < 0.0 {
            return Err(Error::InvalidInput("prox parameter t must be nonnegative".into()));
        }
        Ok(DVector::from_fn(v.len(), |i, _| {
            v[i] / (1.0 + t * self.scaling[i] * self.scaling[i])
        }))
    }

    fn subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        // gradient D²x — the only subgradient of a smooth penalty
        DVector::from_fn(x.len(), |i, _| self.scaling[i] * self.scaling[i] * x[i])
    }
}

/// Componentwise shrinkage `sign(v_i)·max(|v_i| − t, 0)`; the proximal map
/// of `t·‖·‖₁`.
pub fn soft_threshold(v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if t < 0.0 {
        return Err(Error::InvalidInput("soft threshold t must be nonnegative".into()));
    }
    Ok(v.map(|vi| vi.signum() * (vi.abs() - t).max(0.0)))
}

/// Bregman distance evaluation `d = R(x1) − R(x2) − ⟨ξ, x1 − x2⟩`.
#[derive(Debug, Clone)]
pub struct BregmanReport {
    pub distance: f64,
    pub subgradient_used: DVector<f64>,
    pub base_point: DVector<f64>,
}

/// Computes the Bregman distance of `x1` from `x2`. With `xi = None`, the
/// penalty's subgradient selection rule is applied at `x2`; a supplied `xi`
/// that violates the subgradient inequality on this pair is rejected.
pub fn bregman_distance(
    penalty: &dyn Penalty,
    x1: &DVector<f64>,
    x2: &DVector<f64>,
    xi: Option<&DVector<f64>>,
) -> Result<BregmanReport> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x2.len(),
            got: x1.len(),
        });
    }
    let xi = match xi {
        Some(x) => {
            if x.len() != x2.len() {
                return Err(Error::DimensionMismatch {
                    expected: x2.len(),
                    got: x.len(),
                });
            }
            x.clone()
        }
        None => penalty.subgradient(x2),
    };
    let r1 = penalty.value(x1);
    let r2 = penalty.value(x2);
    let distance = r1 - r2 - xi.dot(&(x1 - x2));
    if distance < -1e-12 * (1.0 + r1.abs() + r2.abs()) {
        return Err(Error::InvalidInput(format!(
            "supplied xi violates the subgradient inequality: d = {distance}"
        )));
    }
    Ok(BregmanReport {
        distance,
        subgradient_used: xi,
        base_point: x2.clone(),
    })
}
