//! Versioned solution documents: a constructed symmetric Beltrami field with
//! its eigenvalue, symmetry, residuals and helicity. Torus fields are stored
//! spectrally (exact round-trip); the sphere golden case is stored as a
//! catalog reference and rebuilt on load.

use crate::config::RunConfig;
use beltrami_core::catalog::{self, KillingEntry};
use beltrami_core::error::{Error, Result};
use beltrami_core::field::{ScalarField, VectorField};
use beltrami_core::scalar_eigen::{
    beltrami_from_scalar, golden_sphere_pair, ConstructionReport, FieldRep,
};
use beltrami_core::spectral::{SpectralField, SpectralFieldDoc};
use beltrami_core::structure::first_integral_of_pair;
use beltrami_core::symmetry::Direction;
use serde::{Deserialize, Serialize};

pub const SOLUTION_SCHEMA: &str = "beltrami-solution/1";

/// Reference to the analytic (non-spectral) field of a solution.
pub const ANALYTIC_S3_GOLDEN: &str = "s3_hopf_golden";

#[derive(Serialize, Deserialize)]
pub struct SolutionDoc {
    pub schema: String,
    pub run_config: RunConfig,
    pub model: String,
    pub symmetry: String,
    pub direction: Option<String>,
    pub route: String,
    /// Beltrami eigenvalue: curl X = mu X.
    pub mu: f64,
    /// Constrained Laplacian eigenvalue (scalar route) or mu² (kappa = 0).
    pub lambda: f64,
    pub kappa: f64,
    /// Operator eigenvalue 1/mu when constructed via the operator route.
    pub operator_eigenvalue: Option<f64>,
    pub helicity: Option<f64>,
    pub residuals: ConstructionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_field: Option<SpectralFieldDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_field: Option<String>,
}

/// A loaded solution ready for dynamics: the field, its symmetry entry and the
/// first integral f = g(X,Y)/mu.
pub struct LoadedSolution {
    pub mu: f64,
    pub entry: KillingEntry,
    pub field: VectorField,
    pub spectral: Option<SpectralField>,
    pub first_integral: ScalarField,
}

pub fn entry_for_symmetry(symmetry: &str) -> Result<KillingEntry> {
    if catalog::catalog_names().contains(&symmetry) {
        catalog::catalog_get(symmetry)
    } else {
        let direction = Direction::parse(symmetry)?;
        catalog::entry_for_direction(&direction)
    }
}

pub fn save(doc: &SolutionDoc, path: &std::path::Path) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::InvalidArgument(format!("serialize solution: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| Error::InvalidArgument(format!("write {}: {e}", path.display())))?;
    Ok(())
}

pub fn load_doc(path: &std::path::Path) -> Result<SolutionDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("read {}: {e}", path.display())))?;
    let doc: SolutionDoc = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("parse {}: {e}", path.display())))?;
    if doc.schema != SOLUTION_SCHEMA {
        return Err(Error::InvalidArgument(format!(
            "unsupported solution schema '{}'",
            doc.schema
        )));
    }
    Ok(doc)
}

pub fn load(path: &std::path::Path) -> Result<LoadedSolution> {
    let doc = load_doc(path)?;
    let entry = entry_for_symmetry(&doc.symmetry)?;
    let (field, spectral) = match (&doc.spectral_field, &doc.analytic_field) {
        (Some(spec_doc), None) => {
            let s = SpectralField::from_doc(spec_doc)?;
            (s.to_vector_field(), Some(s))
        }
        (None, Some(name)) if name == ANALYTIC_S3_GOLDEN => {
            let construction = beltrami_from_scalar(&entry, &golden_sphere_pair())?;
            match construction.field {
                FieldRep::Analytic(v) => (v, None),
                FieldRep::Spectral(_) => unreachable!("sphere construction is analytic"),
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "solution carries neither a spectral field nor a known analytic reference".into(),
            ))
        }
    };
    let first_integral = first_integral_of_pair(&entry.model, &field, &entry.field, doc.mu)?;
    Ok(LoadedSolution { mu: doc.mu, entry, field, spectral, first_integral })
}
