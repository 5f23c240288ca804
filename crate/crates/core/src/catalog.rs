//! Closed-form catalog of Killing fields on the model manifolds, with their
//! curl-proportionality constants, squared norms and known first integrals.
//!
//! Chart expressions for the Hopf field (both stereographic charts) and its
//! first integral were derived with a symbolic oracle and are frozen here;
//! regression tests cross-check them against the finite-difference path.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::linalg::{Mat3, Vec3};
use crate::manifold::{ChartId, ChartPoint, ManifoldModel};
use crate::symmetry::Direction;

/// A named scalar first integral of a catalog field.
#[derive(Clone)]
pub struct FirstIntegral {
    pub name: String,
    pub field: ScalarField,
}

/// A catalog Killing field Y together with the constants the constructions
/// need: κ with curl Y = κY (when it exists), c = g(Y,Y) (when constant).
#[derive(Clone)]
pub struct KillingEntry {
    pub name: String,
    pub model: ManifoldModel,
    pub field: VectorField,
    pub kappa: Option<f64>,
    pub c: Option<f64>,
    pub first_integrals: Vec<FirstIntegral>,
    /// Translation direction for torus entries (links into the spectral pipeline).
    pub direction: Option<Direction>,
    /// Box of chart points the entry's invariants are sampled on.
    pub sample_lo: Vec3,
    pub sample_hi: Vec3,
}

pub const CATALOG_NAMES: [&str; 6] =
    ["t3_e1", "t3_e2", "t3_e3", "t3_irrational", "s3_hopf", "r3_rotation_patch"];

pub fn catalog_names() -> &'static [&'static str] {
    &CATALOG_NAMES
}

pub fn catalog_get(name: &str) -> Result<KillingEntry> {
    match name {
        "t3_e1" => Ok(translation_entry(0)),
        "t3_e2" => Ok(translation_entry(1)),
        "t3_e3" => Ok(translation_entry(2)),
        "t3_irrational" => Ok(irrational_entry()),
        "s3_hopf" => Ok(hopf_entry()),
        "r3_rotation_patch" => Ok(rotation_patch_entry()),
        other => Err(Error::UnknownCatalogEntry(other.to_string())),
    }
}

fn periodic_coordinate_integral(axis: usize) -> FirstIntegral {
    use std::f64::consts::TAU;
    let name = ["cos(2*pi*x)", "cos(2*pi*y)", "cos(2*pi*z)"][axis].to_string();
    FirstIntegral {
        name,
        field: ScalarField::with_partials(
            move |p: &ChartPoint| (TAU * p.coords[axis]).cos(),
            move |p: &ChartPoint| {
                let mut d = [0.0; 3];
                d[axis] = -TAU * (TAU * p.coords[axis]).sin();
                d
            },
        ),
    }
}

fn translation_entry(axis: usize) -> KillingEntry {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let first_integrals = (0..3).filter(|&j| j != axis).map(periodic_coordinate_integral).collect();
    KillingEntry {
        name: ["t3_e1", "t3_e2", "t3_e3"][axis].to_string(),
        model: ManifoldModel::unit_torus(),
        field: VectorField::constant(e),
        kappa: Some(0.0),
        c: Some(1.0),
        first_integrals,
        direction: Some(Direction::axis(axis)),
        sample_lo: [0.0; 3],
        sample_hi: [1.0; 3],
    }
}

fn irrational_entry() -> KillingEntry {
    let v = [1.0, 2f64.sqrt(), 6f64.sqrt()];
    KillingEntry {
        name: "t3_irrational".to_string(),
        model: ManifoldModel::unit_torus(),
        field: VectorField::constant(v),
        kappa: Some(0.0),
        c: Some(9.0), // 1 + 2 + 6
        first_integrals: Vec::new(),
        direction: Some(Direction::IrrationalSqrt26),
        sample_lo: [0.0; 3],
        sample_hi: [1.0; 3],
    }
}

/// Hopf field (−X₂, X₁, −X₄, X₃) on the unit S³, pushed to the stereographic
/// charts. Main chart (projection from (0,0,0,1)):
///   H = (x₁x₃ − x₂, x₂x₃ + x₁, (1 − x₁² − x₂² + x₃²)/2)
/// Antipodal chart:
///   H = (−x₁x₃ − x₂, x₁ − x₂x₃, −(1 − x₁² − x₂² + x₃²)/2)
pub fn hopf_vector_field() -> VectorField {
    VectorField::with_jacobian(
        |p: &ChartPoint| {
            let [x, y, z] = p.coords;
            match p.chart {
                ChartId::Main => {
                    [x * z - y, y * z + x, 0.5 * (1.0 - x * x - y * y + z * z)]
                }
                ChartId::Antipodal => {
                    [-x * z - y, x - y * z, -0.5 * (1.0 - x * x - y * y + z * z)]
                }
            }
        },
        |p: &ChartPoint| -> Mat3 {
            let [x, y, z] = p.coords;
            match p.chart {
                ChartId::Main => [[z, -1.0, x], [1.0, z, y], [-x, -y, z]],
                ChartId::Antipodal => [[-z, -1.0, -x], [1.0, -z, -y], [x, y, -z]],
            }
        },
    )
}

/// Pullback of the ambient first integral x₁² + x₂² to both charts:
/// f(x) = 4(x₁² + x₂²)/(1 + |x|²)² (the same expression in either chart).
pub fn hopf_first_integral() -> ScalarField {
    ScalarField::with_partials(
        |p: &ChartPoint| {
            let [x, y, z] = p.coords;
            let s = 1.0 + x * x + y * y + z * z;
            4.0 * (x * x + y * y) / (s * s)
        },
        |p: &ChartPoint| {
            let [x, y, z] = p.coords;
            let a = x * x + y * y;
            let s = 1.0 + a + z * z;
            let s3 = s * s * s;
            [
                8.0 * x * (s - 2.0 * a) / s3,
                8.0 * y * (s - 2.0 * a) / s3,
                -16.0 * a * z / s3,
            ]
        },
    )
}

fn hopf_entry() -> KillingEntry {
    KillingEntry {
        name: "s3_hopf".to_string(),
        model: ManifoldModel::sphere(),
        field: hopf_vector_field(),
        kappa: Some(2.0),
        c: Some(1.0),
        first_integrals: vec![FirstIntegral {
            name: "x1^2+x2^2".to_string(),
            field: hopf_first_integral(),
        }],
        direction: None,
        sample_lo: [-0.9; 3],
        sample_hi: [0.9; 3],
    }
}

/// Rotation generator (−y, x, 0) on a flat chart cube off the z-axis.
/// Killing but not Beltrami (curl Y = 2e₃ is not proportional to Y); exists to
/// exercise the identity suite with a non-constant-norm Killing field.
fn rotation_patch_entry() -> KillingEntry {
    let field = VectorField::with_jacobian(
        |p: &ChartPoint| [-p.coords[1], p.coords[0], 0.0],
        |_| [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    );
    let radius_sq = FirstIntegral {
        name: "x^2+y^2".to_string(),
        field: ScalarField::with_partials(
            |p: &ChartPoint| p.coords[0] * p.coords[0] + p.coords[1] * p.coords[1],
            |p: &ChartPoint| [2.0 * p.coords[0], 2.0 * p.coords[1], 0.0],
        ),
    };
    let height = FirstIntegral {
        name: "z".to_string(),
        field: ScalarField::with_partials(|p: &ChartPoint| p.coords[2], |_| [0.0, 0.0, 1.0]),
    };
    KillingEntry {
        name: "r3_rotation_patch".to_string(),
        model: ManifoldModel::unit_torus(), // flat chart; patch semantics, no wrapping
        field,
        kappa: None,
        c: None,
        first_integrals: vec![radius_sq, height],
        direction: None,
        sample_lo: [1.0, 1.0, 0.0],
        sample_hi: [2.0, 2.0, 1.0],
    }
}

/// Killing entry for an arbitrary supported translation direction on the
/// torus: the catalog's own entry when the direction is a coordinate axis or
/// the irrational vector, otherwise a synthesized constant-field entry with
/// κ = 0 and c = |v|².
pub fn entry_for_direction(direction: &Direction) -> Result<KillingEntry> {
    direction.validate()?;
    match direction {
        Direction::Integer([1, 0, 0]) => catalog_get("t3_e1"),
        Direction::Integer([0, 1, 0]) => catalog_get("t3_e2"),
        Direction::Integer([0, 0, 1]) => catalog_get("t3_e3"),
        Direction::IrrationalSqrt26 => catalog_get("t3_irrational"),
        Direction::Integer(v) => {
            let vf = direction.as_vec();
            Ok(KillingEntry {
                name: format!("t3_translation({},{},{})", v[0], v[1], v[2]),
                model: ManifoldModel::unit_torus(),
                field: VectorField::constant(vf),
                kappa: Some(0.0),
                c: Some(crate::linalg::dot(vf, vf)),
                first_integrals: Vec::new(),
                direction: Some(direction.clone()),
                sample_lo: [0.0; 3],
                sample_hi: [1.0; 3],
            })
        }
    }
}

impl KillingEntry {
    /// Deterministic lattice of sample points inside the entry's box.
    pub fn sample_points(&self, per_axis: usize) -> Vec<ChartPoint> {
        let mut pts = Vec::with_capacity(per_axis.pow(3));
        let step = |lo: f64, hi: f64, i: usize| {
            lo + (hi - lo) * (i as f64 + 0.5) / per_axis as f64
        };
        for i in 0..per_axis {
            for j in 0..per_axis {
                for l in 0..per_axis {
                    pts.push(ChartPoint::main([
                        step(self.sample_lo[0], self.sample_hi[0], i),
                        step(self.sample_lo[1], self.sample_hi[1], j),
                        step(self.sample_lo[2], self.sample_hi[2], l),
                    ]));
                }
            }
        }
        pts
    }
}
