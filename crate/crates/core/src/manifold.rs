//! Chart-described model 3-manifolds: the flat 3-torus and the round 3-sphere
//! in stereographic charts.
//!
//! The sphere carries two charts (projection from the two poles). Both use the
//! conformal metric g_ij(x) = 4/(1+|x|²)² δ_ij; the transition map y = x/|x|²
//! is orientation-reversing, so the antipodal chart carries orientation sign
//! −1 to keep curl and the cross product globally consistent.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Vec3, IDENTITY, ZERO_MAT};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartId {
    Main,
    Antipodal,
}

/// A point in a specific chart of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: Vec3,
}

impl ChartPoint {
    pub fn main(coords: Vec3) -> Self {
        ChartPoint { chart: ChartId::Main, coords }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ManifoldModel {
    /// Unit-period flat torus; metric is the identity everywhere.
    FlatTorus3 { period: Vec3 },
    /// Round 3-sphere of radius 1 in stereographic charts.
    RoundSphere3,
}

/// Chart radius beyond which sphere evaluation moves to the antipodal chart,
/// keeping the conformal factor well-conditioned.
pub const SPHERE_CHART_SWITCH_RADIUS: f64 = 2.0;

impl ManifoldModel {
    pub fn unit_torus() -> Self {
        ManifoldModel::FlatTorus3 { period: [1.0, 1.0, 1.0] }
    }

    pub fn sphere() -> Self {
        ManifoldModel::RoundSphere3
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, ManifoldModel::FlatTorus3 { .. })
    }

    /// Conformal factor of the sphere chart metric, 4/(1+|x|²)².
    fn conformal(coords: Vec3) -> f64 {
        let s = 1.0 + linalg::dot(coords, coords);
        4.0 / (s * s)
    }

    /// Metric matrix g_ij at a chart point. Symmetric positive definite.
    pub fn metric(&self, p: &ChartPoint) -> Result<Mat3> {
        if !linalg::all_finite(p.coords) {
            return Err(Error::NonFiniteInput);
        }
        Ok(match self {
            ManifoldModel::FlatTorus3 { .. } => IDENTITY,
            ManifoldModel::RoundSphere3 => {
                let phi = Self::conformal(p.coords);
                [[phi, 0.0, 0.0], [0.0, phi, 0.0], [0.0, 0.0, phi]]
            }
        })
    }

    pub fn metric_inverse(&self, p: &ChartPoint) -> Result<Mat3> {
        Ok(match self {
            ManifoldModel::FlatTorus3 { .. } => IDENTITY,
            ManifoldModel::RoundSphere3 => {
                let inv = 1.0 / Self::conformal(p.coords);
                if !inv.is_finite() {
                    return Err(Error::NonFiniteInput);
                }
                [[inv, 0.0, 0.0], [0.0, inv, 0.0], [0.0, 0.0, inv]]
            }
        })
    }

    pub fn sqrt_det_metric(&self, p: &ChartPoint) -> Result<f64> {
        Ok(match self {
            ManifoldModel::FlatTorus3 { .. } => 1.0,
            ManifoldModel::RoundSphere3 => {
                let phi = Self::conformal(p.coords);
                phi * phi.sqrt()
            }
        })
    }

    /// Coordinate partials of the metric, `out[k][i][j] = ∂_k g_ij`.
    /// Closed-form for both models (flat: zero; sphere: conformal).
    pub fn metric_partials(&self, p: &ChartPoint) -> Result<[Mat3; 3]> {
        Ok(match self {
            ManifoldModel::FlatTorus3 { .. } => [ZERO_MAT; 3],
            ManifoldModel::RoundSphere3 => {
                let x = p.coords;
                let s = 1.0 + linalg::dot(x, x);
                // ∂_k φ = −16 x_k / s³
                let dphi = -16.0 / (s * s * s);
                let mut out = [ZERO_MAT; 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    let v = dphi * x[k];
                    slot[0][0] = v;
                    slot[1][1] = v;
                    slot[2][2] = v;
                }
                out
            }
        })
    }

    /// ∂_k log √det g, used by the analytic divergence path.
    pub fn log_sqrt_det_partials(&self, p: &ChartPoint) -> Vec3 {
        match self {
            ManifoldModel::FlatTorus3 { .. } => [0.0; 3],
            ManifoldModel::RoundSphere3 => {
                // log √g = log 8 − 3 log(1+|x|²)
                let x = p.coords;
                let s = 1.0 + linalg::dot(x, x);
                linalg::scale(x, -6.0 / s)
            }
        }
    }

    /// Orientation sign of the chart: ε¹²³ = +1 in the main chart; the sphere
    /// antipodal chart compensates the orientation-reversing transition.
    pub fn orientation(&self, chart: ChartId) -> f64 {
        match (self, chart) {
            (ManifoldModel::RoundSphere3, ChartId::Antipodal) => -1.0,
            _ => 1.0,
        }
    }

    /// g(u, v) at p.
    pub fn inner(&self, p: &ChartPoint, u: Vec3, v: Vec3) -> f64 {
        match self {
            ManifoldModel::FlatTorus3 { .. } => linalg::dot(u, v),
            ManifoldModel::RoundSphere3 => Self::conformal(p.coords) * linalg::dot(u, v),
        }
    }

    /// |v|_g at p.
    pub fn g_norm(&self, p: &ChartPoint, v: Vec3) -> f64 {
        self.inner(p, v, v).sqrt()
    }

    /// Torus coordinates wrapped into [0, L). Presentation only: field
    /// evaluation never wraps (periodic fields do not need it, patch fields
    /// must not be wrapped).
    pub fn wrap(&self, coords: Vec3) -> Vec3 {
        match self {
            ManifoldModel::FlatTorus3 { period } => {
                let mut out = coords;
                for i in 0..3 {
                    out[i] = coords[i].rem_euclid(period[i]);
                }
                out
            }
            ManifoldModel::RoundSphere3 => coords,
        }
    }

    /// Whether the integrator should move this sphere point to the other chart.
    pub fn needs_chart_switch(&self, p: &ChartPoint) -> bool {
        matches!(self, ManifoldModel::RoundSphere3)
            && linalg::norm(p.coords) > SPHERE_CHART_SWITCH_RADIUS
    }

    /// Stereographic chart transition y = x/|x|² (sphere only; involutive).
    pub fn switch_chart(&self, p: &ChartPoint) -> Result<ChartPoint> {
        match self {
            ManifoldModel::RoundSphere3 => {
                let r2 = linalg::dot(p.coords, p.coords);
                if r2 == 0.0 {
                    return Err(Error::InvalidArgument(
                        "chart transition undefined at the chart origin".into(),
                    ));
                }
                let chart = match p.chart {
                    ChartId::Main => ChartId::Antipodal,
                    ChartId::Antipodal => ChartId::Main,
                };
                Ok(ChartPoint { chart, coords: linalg::scale(p.coords, 1.0 / r2) })
            }
            ManifoldModel::FlatTorus3 { .. } => Err(Error::InvalidArgument(
                "the torus has a single chart".into(),
            )),
        }
    }

    /// Pushforward of a chart-frame vector under the chart transition at p.
    /// d(x/|x|²) = (I − 2 x̂ x̂ᵀ)/|x|².
    pub fn switch_chart_vector(&self, p: &ChartPoint, v: Vec3) -> Vec3 {
        let x = p.coords;
        let r2 = linalg::dot(x, x);
        let xv = linalg::dot(x, v);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (v[i] - 2.0 * x[i] * xv / r2) / r2;
        }
        out
    }

    /// Ambient ℝ⁴ embedding of a sphere chart point (used for chart-independent
    /// distances, e.g. closed-orbit return checks).
    pub fn embed_sphere(&self, p: &ChartPoint) -> [f64; 4] {
        let x = p.coords;
        let r2 = linalg::dot(x, x);
        let s = 1.0 + r2;
        match p.chart {
            ChartId::Main => [2.0 * x[0] / s, 2.0 * x[1] / s, 2.0 * x[2] / s, (r2 - 1.0) / s],
            ChartId::Antipodal => {
                [2.0 * x[0] / s, 2.0 * x[1] / s, 2.0 * x[2] / s, (1.0 - r2) / s]
            }
        }
    }
}
