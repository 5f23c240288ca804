//! Scalar and vector point fields on chart coordinates.
//!
//! A field is a deterministic callable on chart points, optionally carrying
//! closed-form first derivatives. Operations use the analytic derivatives when
//! present and central finite differences otherwise; `without_derivatives`
//! strips the analytic path so convergence studies exercise genuine FD.

use crate::error::{Error, Result};
use crate::linalg::{all_finite, Mat3, Vec3};
use crate::manifold::ChartPoint;
use std::sync::Arc;

pub type ScalarFn = dyn Fn(&ChartPoint) -> f64 + Send + Sync;
pub type VecFn = dyn Fn(&ChartPoint) -> Vec3 + Send + Sync;
pub type JacFn = dyn Fn(&ChartPoint) -> Mat3 + Send + Sync;

/// Finite-difference configuration: step in chart units, stencil order 2 or 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub h: f64,
    pub order: FdOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { h: 1e-3, order: FdOrder::Two }
    }
}

impl FdConfig {
    pub fn new(h: f64, order: FdOrder) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument("FD step must be positive".into()));
        }
        Ok(FdConfig { h, order })
    }

    pub fn halved(&self) -> Self {
        FdConfig { h: self.h / 2.0, order: self.order }
    }
}

fn central_diff<F: Fn(&ChartPoint) -> f64>(f: F, p: &ChartPoint, axis: usize, cfg: FdConfig) -> f64 {
    let at = |offset: f64| {
        let mut q = *p;
        q.coords[axis] += offset;
        f(&q)
    };
    let h = cfg.h;
    match cfg.order {
        FdOrder::Two => (at(h) - at(-h)) / (2.0 * h),
        FdOrder::Four => (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h),
    }
}

#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<ScalarFn>,
    partials: Option<Arc<VecFn>>,
}

impl ScalarField {
    pub fn new(eval: impl Fn(&ChartPoint) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { eval: Arc::new(eval), partials: None }
    }

    pub fn with_partials(
        eval: impl Fn(&ChartPoint) -> f64 + Send + Sync + 'static,
        partials: impl Fn(&ChartPoint) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        ScalarField { eval: Arc::new(eval), partials: Some(Arc::new(partials)) }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::with_partials(move |_| c, |_| [0.0; 3])
    }

    pub fn value(&self, p: &ChartPoint) -> f64 {
        (self.eval)(p)
    }

    pub fn has_partials(&self) -> bool {
        self.partials.is_some()
    }

    /// Coordinate partials ∂_i f: analytic when available, central FD otherwise.
    pub fn partials_at(&self, p: &ChartPoint, cfg: FdConfig) -> Result<Vec3> {
        if !all_finite(p.coords) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(dp) = &self.partials {
            return Ok(dp(p));
        }
        let mut out = [0.0; 3];
        for (axis, slot) in out.iter_mut().enumerate() {
            *slot = central_diff(|q| (self.eval)(q), p, axis, cfg);
        }
        if !all_finite(out) {
            return Err(Error::NonFiniteInput);
        }
        Ok(out)
    }

    /// Same field with the analytic-derivative fast path removed.
    pub fn without_derivatives(&self) -> Self {
        ScalarField { eval: self.eval.clone(), partials: None }
    }
}

#[derive(Clone)]
pub struct VectorField {
    eval: Arc<VecFn>,
    jacobian: Option<Arc<JacFn>>,
}

impl VectorField {
    pub fn new(eval: impl Fn(&ChartPoint) -> Vec3 + Send + Sync + 'static) -> Self {
        VectorField { eval: Arc::new(eval), jacobian: None }
    }

    /// `jacobian` returns J with `J[i][j] = ∂_j X^i`.
    pub fn with_jacobian(
        eval: impl Fn(&ChartPoint) -> Vec3 + Send + Sync + 'static,
        jacobian: impl Fn(&ChartPoint) -> Mat3 + Send + Sync + 'static,
    ) -> Self {
        VectorField { eval: Arc::new(eval), jacobian: Some(Arc::new(jacobian)) }
    }

    pub fn constant(v: Vec3) -> Self {
        VectorField::with_jacobian(move |_| v, |_| [[0.0; 3]; 3])
    }

    pub fn zero() -> Self {
        VectorField::constant([0.0; 3])
    }

    pub fn value(&self, p: &ChartPoint) -> Vec3 {
        (self.eval)(p)
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Jacobian `J[i][j] = ∂_j X^i`: analytic when available, central FD otherwise.
    pub fn jacobian_at(&self, p: &ChartPoint, cfg: FdConfig) -> Result<Mat3> {
        if !all_finite(p.coords) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(j) = &self.jacobian {
            return Ok(j(p));
        }
        let mut out = [[0.0; 3]; 3];
        for axis in 0..3 {
            for comp in 0..3 {
                out[comp][axis] = central_diff(|q| (self.eval)(q)[comp], p, axis, cfg);
            }
        }
        if !out.iter().all(|row| all_finite(*row)) {
            return Err(Error::NonFiniteInput);
        }
        Ok(out)
    }

    pub fn without_derivatives(&self) -> Self {
        VectorField { eval: self.eval.clone(), jacobian: None }
    }
}
