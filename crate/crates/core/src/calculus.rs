//! Pointwise Riemannian vector calculus in charts: gradient, divergence, curl,
//! Lie bracket, metric cross product, Killing residual, covariant acceleration
//! and the grad/cross/bracket identity residual.
//!
//! Derivatives are taken analytically whenever the involved fields (and the
//! metric, which is always closed-form on the two models) carry them, and by
//! central differences otherwise.

use crate::error::Result;
use crate::field::{FdConfig, ScalarField, VectorField};
use crate::linalg::{self, Mat3, Vec3};
use crate::manifold::{ChartPoint, ManifoldModel};

/// Metric matrix at a chart point (symmetric positive definite).
pub fn metric_at(model: &ManifoldModel, p: &ChartPoint) -> Result<Mat3> {
    model.metric(p)
}

/// Riemannian gradient, grad f = g⁻¹ df.
pub fn grad(model: &ManifoldModel, f: &ScalarField, p: &ChartPoint, cfg: FdConfig) -> Result<Vec3> {
    let df = f.partials_at(p, cfg)?;
    let ginv = model.metric_inverse(p)?;
    Ok(linalg::mat_vec(&ginv, df))
}

/// Divergence, (1/√g) ∂_i (√g X^i).
pub fn div(model: &ManifoldModel, x: &VectorField, p: &ChartPoint, cfg: FdConfig) -> Result<f64> {
    if x.has_jacobian() {
        let j = x.jacobian_at(p, cfg)?;
        let v = x.value(p);
        let dlog = model.log_sqrt_det_partials(p);
        Ok(j[0][0] + j[1][1] + j[2][2] + linalg::dot(v, dlog))
    } else {
        // FD on the flux components √g X^i directly
        let mut acc = 0.0;
        let h = cfg.h;
        for axis in 0..3 {
            let flux = |offset: f64| -> Result<f64> {
                let mut q = *p;
                q.coords[axis] += offset;
                Ok(model.sqrt_det_metric(&q)? * x.value(&q)[axis])
            };
            acc += match cfg.order {
                crate::field::FdOrder::Two => (flux(h)? - flux(-h)?) / (2.0 * h),
                crate::field::FdOrder::Four => {
                    (-flux(2.0 * h)? + 8.0 * flux(h)? - 8.0 * flux(-h)? + flux(-2.0 * h)?) / (12.0 * h)
                }
            };
        }
        Ok(acc / model.sqrt_det_metric(p)?)
    }
}

/// Partials of the lowered field V_k = g_kl X^l, `out[k][j] = ∂_j V_k`.
fn lowered_partials(
    model: &ManifoldModel,
    x: &VectorField,
    p: &ChartPoint,
    cfg: FdConfig,
) -> Result<Mat3> {
    if x.has_jacobian() {
        let g = model.metric(p)?;
        let dg = model.metric_partials(p)?;
        let j = x.jacobian_at(p, cfg)?;
        let v = x.value(p);
        let mut out = [[0.0; 3]; 3];
        for k in 0..3 {
            for jj in 0..3 {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += dg[jj][k][l] * v[l] + g[k][l] * j[l][jj];
                }
                out[k][jj] = acc;
            }
        }
        Ok(out)
    } else {
        let h = cfg.h;
        let lowered = |q: &ChartPoint, k: usize| -> Result<f64> {
            let g = model.metric(q)?;
            let v = x.value(q);
            Ok(g[k][0] * v[0] + g[k][1] * v[1] + g[k][2] * v[2])
        };
        let mut out = [[0.0; 3]; 3];
        for k in 0..3 {
            for axis in 0..3 {
                let at = |offset: f64| -> Result<f64> {
                    let mut q = *p;
                    q.coords[axis] += offset;
                    lowered(&q, k)
                };
                out[k][axis] = match cfg.order {
                    crate::field::FdOrder::Two => (at(h)? - at(-h)?) / (2.0 * h),
                    crate::field::FdOrder::Four => {
                        (-at(2.0 * h)? + 8.0 * at(h)? - 8.0 * at(-h)? + at(-2.0 * h)?) / (12.0 * h)
                    }
                };
            }
        }
        Ok(out)
    }
}

/// Curl, (curl X)^i = (σ/√g) ε^{ijk} ∂_j (g_kl X^l), with σ the chart
/// orientation sign.
pub fn curl(model: &ManifoldModel, x: &VectorField, p: &ChartPoint, cfg: FdConfig) -> Result<Vec3> {
    let dv = lowered_partials(model, x, p, cfg)?;
    let sg = model.sqrt_det_metric(p)?;
    let orient = model.orientation(p.chart);
    let mut out = [0.0; 3];
    for i in 0..3 {
        let mut acc = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let eps = linalg::levi_civita(i, j, k);
                if eps != 0.0 {
                    acc += eps * dv[k][j];
                }
            }
        }
        out[i] = orient * acc / sg;
    }
    Ok(out)
}

/// Lie bracket `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i` (metric-independent).
pub fn lie_bracket(
    model: &ManifoldModel,
    x: &VectorField,
    y: &VectorField,
    p: &ChartPoint,
    cfg: FdConfig,
) -> Result<Vec3> {
    let _ = model;
    let jx = x.jacobian_at(p, cfg)?;
    let jy = y.jacobian_at(p, cfg)?;
    let vx = x.value(p);
    let vy = y.value(p);
    let mut out = [0.0; 3];
    for i in 0..3 {
        let mut acc = 0.0;
        for j in 0..3 {
            acc += vx[j] * jy[i][j] - vy[j] * jx[i][j];
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Riemannian cross product, (u×v)^i = σ (g⁻¹)^{il} √g ε_{ljk} u^j v^k.
/// Pure pointwise algebra; g-orthogonal to both factors and satisfying the
/// Lagrange identity |u×v|² = |u|²|v|² − g(u,v)².
pub fn cross(model: &ManifoldModel, p: &ChartPoint, u: Vec3, v: Vec3) -> Vec3 {
    match model {
        ManifoldModel::FlatTorus3 { .. } => linalg::cross_euclid(u, v),
        ManifoldModel::RoundSphere3 => {
            // conformal g = φδ: (u×v) = σ φ^{1/2} (u×v)_euclid
            let s = 1.0 + linalg::dot(p.coords, p.coords);
            let phi_sqrt = 2.0 / s;
            let orient = model.orientation(p.chart);
            linalg::scale(linalg::cross_euclid(u, v), orient * phi_sqrt)
        }
    }
}

/// Pointwise inner product field g(X, Y), carrying analytic partials when both
/// factors have Jacobians (the metric partials are always closed-form).
pub fn scalar_product_field(
    model: &ManifoldModel,
    x: &VectorField,
    y: &VectorField,
) -> ScalarField {
    let m = model.clone();
    let xe = x.clone();
    let ye = y.clone();
    let value = move |p: &ChartPoint| m.inner(p, xe.value(p), ye.value(p));
    if x.has_jacobian() && y.has_jacobian() {
        let m2 = model.clone();
        let x2 = x.clone();
        let y2 = y.clone();
        let cfg = FdConfig::default(); // unused: both jacobians are analytic
        let partials = move |p: &ChartPoint| {
            let g = m2.metric(p).expect("finite point");
            let dg = m2.metric_partials(p).expect("finite point");
            let jx = x2.jacobian_at(p, cfg).expect("analytic");
            let jy = y2.jacobian_at(p, cfg).expect("analytic");
            let vx = x2.value(p);
            let vy = y2.value(p);
            let mut out = [0.0; 3];
            for k in 0..3 {
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += dg[k][i][j] * vx[i] * vy[j];
                    }
                    for j in 0..3 {
                        acc += g[i][j] * (jx[i][k] * vy[j] + vx[i] * jy[j][k]);
                    }
                }
                out[k] = acc;
            }
            out
        };
        ScalarField::with_partials(value, partials)
    } else {
        ScalarField::new(value)
    }
}

/// Killing residual (L_Y g)_{ij} = Y^k ∂_k g_ij + g_kj ∂_i Y^k + g_ik ∂_j Y^k.
/// Zero (to FD order) exactly when Y satisfies the Killing equations at p.
pub fn killing_residual(
    model: &ManifoldModel,
    y: &VectorField,
    p: &ChartPoint,
    cfg: FdConfig,
) -> Result<Mat3> {
    let g = model.metric(p)?;
    let dg = model.metric_partials(p)?;
    let j = y.jacobian_at(p, cfg)?;
    let v = y.value(p);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for jj in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += v[k] * dg[k][i][jj] + g[k][jj] * j[k][i] + g[i][k] * j[k][jj];
            }
            out[i][jj] = acc;
        }
    }
    Ok(out)
}

/// Covariant acceleration ∇_Y Y = ½ grad(g(Y,Y)) − Y × curl(Y).
pub fn covariant_accel(
    model: &ManifoldModel,
    y: &VectorField,
    p: &ChartPoint,
    cfg: FdConfig,
) -> Result<Vec3> {
    let speed_sq = scalar_product_field(model, y, y);
    let half_grad = linalg::scale(grad(model, &speed_sq, p, cfg)?, 0.5);
    let c = cross(model, p, y.value(p), curl(model, y, p, cfg)?);
    Ok(linalg::sub(half_grad, c))
}

/// Residual of the Killing identity `grad(g(X,Y)) − Y×curl(X) − [Y,X]`;
/// vanishes (to the derivative order in use) when Y is Killing.
pub fn identity_residual(
    model: &ManifoldModel,
    x: &VectorField,
    y: &VectorField,
    p: &ChartPoint,
    cfg: FdConfig,
) -> Result<Vec3> {
    let product = scalar_product_field(model, x, y);
    let grad_term = grad(model, &product, p, cfg)?;
    let cross_term = cross(model, p, y.value(p), curl(model, x, p, cfg)?);
    let bracket = lie_bracket(model, y, x, p, cfg)?;
    Ok(linalg::sub(linalg::sub(grad_term, cross_term), bracket))
}

/// Positive Laplacian Δf = −div(grad f). Second derivatives come from nesting
/// the divergence over the gradient, so this is FD-limited unless f is handled
/// spectrally upstream.
pub fn laplacian(model: &ManifoldModel, f: &ScalarField, p: &ChartPoint, cfg: FdConfig) -> Result<f64> {
    let m = model.clone();
    let fc = f.clone();
    let grad_field = VectorField::new(move |q| {
        grad(&m, &fc, q, cfg).unwrap_or([f64::NAN; 3])
    });
    Ok(-div(model, &grad_field, p, cfg)?)
}
