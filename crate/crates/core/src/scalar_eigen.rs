//! Symmetry-constrained scalar eigenproblem and the quadratic Beltrami
//! constructor: from an eigenfunction pair (f, λ) with Δf = λf and Y(f) ≡ 0,
//! build `X = Y×grad f − fμY` with `μ = κ/2 + √(κ²/4 + λ)`, so `curl X = μX`
//! and `[Y,X] ≡ 0`; and the inverse recovery `f = −g(Y,X)/(cμ)`.
//!
//! On the torus the eigenproblem is solved exactly by enumeration over the
//! admitted band (λ(k) = 4π²|k|²); the sphere side ships the single golden
//! pair (f = x₁²+x₂²−1/2, λ = 8) per the catalog.

use crate::calculus;
use crate::catalog::{self, KillingEntry};
use crate::error::{Error, Result};
use crate::field::{FdConfig, ScalarField, VectorField};
use crate::linalg::{self, Vec3};
use crate::manifold::ChartPoint;
use crate::spectral::{SpectralField, SpectralScalar, TAU};
use crate::symmetry::{symmetric_mask, Direction};
use num_complex::Complex64;

/// Scalar eigenfunction representation: exact band-limited coefficients on the
/// torus, closed-form chart expression on the sphere.
#[derive(Clone)]
pub enum ScalarRep {
    Spectral(SpectralScalar),
    Analytic(ScalarField),
}

impl ScalarRep {
    pub fn to_scalar_field(&self) -> ScalarField {
        match self {
            ScalarRep::Spectral(s) => s.to_scalar_field(),
            ScalarRep::Analytic(f) => f.clone(),
        }
    }

    pub fn as_spectral(&self) -> Option<&SpectralScalar> {
        match self {
            ScalarRep::Spectral(s) => Some(s),
            ScalarRep::Analytic(_) => None,
        }
    }
}

/// Boundary condition of the eigenproblem. Both catalog models are closed;
/// the Dirichlet case is recorded for future boundary-domain extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Closed,
    Dirichlet,
}

/// Eigenpair of the positive Laplacian constrained to a symmetry:
/// Δf = λf, g(Y, grad f) ≡ 0, mean-free on closed models.
#[derive(Clone)]
pub struct ScalarEigenpair {
    pub f: ScalarRep,
    pub lambda: f64,
    /// Translation direction when the pair lives on the torus.
    pub direction: Option<Direction>,
    pub mean_free: bool,
    pub boundary: BoundaryCondition,
}

/// Lowest constrained eigenpair on the flat torus: λ = 4π²·min{|k|² : k
/// admitted}; the eigenfunction is the cosine of the lexicographically
/// smallest minimizing wavevector, normalized to ‖f‖²_{L²} = 2.
pub fn solve_constrained_laplacian(direction: &Direction, truncation: usize) -> Result<ScalarEigenpair> {
    let sub = symmetric_mask(direction, truncation)?;
    if sub.is_empty() {
        return Err(Error::NoFirstIntegral { n: truncation });
    }
    let min_sq = sub.min_norm_sq().expect("nonempty");
    let k_star = sub.lex_smallest_with_norm_sq(min_sq).expect("attained");
    let lambda = TAU * TAU * min_sq as f64;
    let f = SpectralScalar::cosine(truncation, k_star, 2.0);
    debug_assert!((f.l2_norm_sq() - 2.0).abs() < 1e-12);
    Ok(ScalarEigenpair {
        f: ScalarRep::Spectral(f),
        lambda,
        direction: Some(direction.clone()),
        mean_free: true,
        boundary: BoundaryCondition::Closed,
    })
}

/// The unnormalized 2.5D source pair f = cos(2πx), λ = 4π² (the amplitude the
/// golden anchors are stated at).
pub fn golden_two_half_d_pair() -> ScalarEigenpair {
    ScalarEigenpair {
        f: ScalarRep::Spectral(SpectralScalar::cosine(1, [1, 0, 0], 1.0)),
        lambda: TAU * TAU,
        direction: Some(Direction::axis(2)),
        mean_free: true,
        boundary: BoundaryCondition::Closed,
    }
}

/// The sphere golden pair: f = x₁²+x₂²−1/2 (chart pullback), Δf = 8f.
pub fn golden_sphere_pair() -> ScalarEigenpair {
    let base = catalog::hopf_first_integral();
    let shifted = ScalarField::with_partials(
        {
            let b = base.clone();
            move |p: &ChartPoint| b.value(p) - 0.5
        },
        {
            let b = base.clone();
            move |p: &ChartPoint| b.partials_at(p, FdConfig::default()).expect("analytic")
        },
    );
    ScalarEigenpair {
        f: ScalarRep::Analytic(shifted),
        lambda: 8.0,
        direction: None,
        mean_free: true,
        boundary: BoundaryCondition::Closed,
    }
}

/// Constructed Beltrami field representation.
#[derive(Clone)]
pub enum FieldRep {
    Spectral(SpectralField),
    Analytic(VectorField),
}

impl FieldRep {
    pub fn to_vector_field(&self) -> VectorField {
        match self {
            FieldRep::Spectral(s) => s.to_vector_field(),
            FieldRep::Analytic(v) => v.clone(),
        }
    }

    pub fn as_spectral(&self) -> Option<&SpectralField> {
        match self {
            FieldRep::Spectral(s) => Some(s),
            FieldRep::Analytic(_) => None,
        }
    }
}

/// Residuals measured while constructing (spectral: exact coefficient norms;
/// sphere: sampled FD sup-norms).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ConstructionReport {
    pub curl_residual: f64,
    pub commutator_residual: f64,
    pub cross_identity_residual: f64,
    pub quadratic_residual: f64,
}

pub struct ConstructionResult {
    pub field: FieldRep,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    /// Factor 1/√c the symmetry was rescaled by (1 when c = 1).
    pub y_rescale: f64,
    pub entry_name: String,
    pub report: ConstructionReport,
}

fn check_constraint_on_samples(entry: &KillingEntry, f: &ScalarField) -> Result<()> {
    let cfg = FdConfig::default();
    for p in entry.sample_points(3) {
        let grad = calculus::grad(&entry.model, f, &p, cfg)?;
        let y = entry.field.value(&p);
        let dot = entry.model.inner(&p, y, grad);
        if dot.abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "g(Y, grad f) = {dot:.3e} at {:?}: the eigenfunction does not obey the symmetry",
                p.coords
            )));
        }
    }
    Ok(())
}

/// Corollary-style constructor X := Y×grad f − fμY (with Y rescaled to unit
/// constant norm), μ := κ/2 + √(κ²/4 + λ).
pub fn beltrami_from_scalar(entry: &KillingEntry, pair: &ScalarEigenpair) -> Result<ConstructionResult> {
    let kappa = entry.kappa.ok_or_else(|| Error::NotBeltramiKilling(entry.name.to_string()))?;
    let c = entry.c.ok_or_else(|| Error::NotBeltramiKilling(entry.name.to_string()))?;
    if !(pair.lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "constructor needs λ > 0, got {}",
            pair.lambda
        )));
    }
    let mu = kappa / 2.0 + (kappa * kappa / 4.0 + pair.lambda).sqrt();
    let y_rescale = 1.0 / c.sqrt();

    // degenerate scalar: constant f constructs X ≡ −μfY with curl μκfY ≠ μX
    match &pair.f {
        ScalarRep::Spectral(s) => {
            if s.l2_norm_sq() - s.mean().norm_sqr() < 1e-24 {
                return Err(Error::DegenerateScalar);
            }
            if s.mean().norm() > 1e-12 {
                return Err(Error::InvalidArgument("eigenfunction must be mean-free".into()));
            }
        }
        ScalarRep::Analytic(f) => {
            let vals: Vec<f64> = entry.sample_points(3).iter().map(|p| f.value(p)).collect();
            let spread = vals.iter().fold(f64::MIN, |a, &b| a.max(b))
                - vals.iter().fold(f64::MAX, |a, &b| a.min(b));
            if spread < 1e-12 {
                return Err(Error::DegenerateScalar);
            }
        }
    }
    check_constraint_on_samples(entry, &pair.f.to_scalar_field())?;

    match (&pair.f, &entry.direction) {
        (ScalarRep::Spectral(f), Some(direction)) => {
            // exact per-mode construction on the torus:
            // X̂(k) = 2πi f̂(k) (Y_u × k) − μ f̂(k) Y_u
            let yu = linalg::scale(direction.as_vec(), y_rescale);
            let n = f.truncation();
            let mut x = SpectralField::zeros(n);
            for k in crate::spectral::modes(n) {
                let fk = *f.get(k);
                if fk.norm() == 0.0 {
                    continue;
                }
                let kv = [k[0] as f64, k[1] as f64, k[2] as f64];
                let yxk = linalg::cross_euclid(yu, kv);
                let itau = Complex64::new(0.0, TAU);
                let mut coeff = [Complex64::ZERO; 3];
                for i in 0..3 {
                    coeff[i] = fk * itau * yxk[i] - fk * mu * yu[i];
                }
                *x.get_mut(k) = coeff;
            }
            let report = spectral_report(&x, f, yu, mu, kappa, pair.lambda);
            Ok(ConstructionResult {
                field: FieldRep::Spectral(x),
                mu,
                lambda: pair.lambda,
                kappa,
                y_rescale,
                entry_name: entry.name.to_string(),
                report,
            })
        }
        _ => {
            // chart-closure construction (sphere golden case and any analytic pair)
            let model = entry.model.clone();
            let y = entry.field.clone();
            let f_field = pair.f.to_scalar_field();
            let cfg = FdConfig::default();
            let m2 = model.clone();
            let y2 = y.clone();
            let f2 = f_field.clone();
            let x = VectorField::new(move |p: &ChartPoint| {
                let grad_f = calculus::grad(&m2, &f2, p, cfg).unwrap_or([f64::NAN; 3]);
                let yv = linalg::scale(y2.value(p), y_rescale);
                let first = calculus::cross(&m2, p, yv, grad_f);
                linalg::sub(first, linalg::scale(yv, mu * f2.value(p)))
            });
            let report = analytic_report(entry, &x, &f_field, y_rescale, mu, kappa, pair.lambda)?;
            Ok(ConstructionResult {
                field: FieldRep::Analytic(x),
                mu,
                lambda: pair.lambda,
                kappa,
                y_rescale,
                entry_name: entry.name.to_string(),
                report,
            })
        }
    }
}

fn spectral_report(
    x: &SpectralField,
    f: &SpectralScalar,
    yu: Vec3,
    mu: f64,
    kappa: f64,
    lambda: f64,
) -> ConstructionReport {
    let curl_residual = x.curl().coeff_sup_distance(&x.scaled(mu));
    // [Y,X] for constant Y = yu: per mode 2πi (k·yu) X̂(k)
    let mut commutator = 0.0f64;
    let mut cross_identity = 0.0f64;
    for k in crate::spectral::modes(x.truncation()) {
        let c = x.get(k);
        let kv = [k[0] as f64, k[1] as f64, k[2] as f64];
        let kdot = linalg::dot(kv, yu) * TAU;
        for i in 0..3 {
            commutator = commutator.max((c[i] * Complex64::new(0.0, kdot)).norm());
        }
        // X×Y − grad f per mode: (X̂×yu) − 2πik f̂
        let xy = [
            c[1] * yu[2] - c[2] * yu[1],
            c[2] * yu[0] - c[0] * yu[2],
            c[0] * yu[1] - c[1] * yu[0],
        ];
        let fk = *f.get(k);
        for i in 0..3 {
            let gradi = fk * Complex64::new(0.0, TAU * kv[i]);
            cross_identity = cross_identity.max((xy[i] - gradi).norm());
        }
    }
    ConstructionReport {
        curl_residual,
        commutator_residual: commutator,
        cross_identity_residual: cross_identity,
        quadratic_residual: (mu * mu - mu * kappa - lambda).abs(),
    }
}

fn analytic_report(
    entry: &KillingEntry,
    x: &VectorField,
    f: &ScalarField,
    y_rescale: f64,
    mu: f64,
    kappa: f64,
    lambda: f64,
) -> Result<ConstructionReport> {
    let cfg = FdConfig::default();
    let mut curl_residual = 0.0f64;
    let mut commutator = 0.0f64;
    let mut cross_identity = 0.0f64;
    for p in entry.sample_points(3) {
        let c = calculus::curl(&entry.model, x, &p, cfg)?;
        let want = linalg::scale(x.value(&p), mu);
        curl_residual = curl_residual.max(linalg::norm_inf(linalg::sub(c, want)));
        let br = calculus::lie_bracket(&entry.model, &entry.field, x, &p, cfg)?;
        commutator = commutator.max(linalg::norm_inf(br));
        let yv = linalg::scale(entry.field.value(&p), y_rescale);
        let xy = calculus::cross(&entry.model, &p, x.value(&p), yv);
        let grad_f = calculus::grad(&entry.model, f, &p, cfg)?;
        cross_identity = cross_identity.max(linalg::norm_inf(linalg::sub(xy, grad_f)));
    }
    Ok(ConstructionReport {
        curl_residual,
        commutator_residual: commutator,
        cross_identity_residual: cross_identity,
        quadratic_residual: (mu * mu - mu * kappa - lambda).abs(),
    })
}

/// Residuals of the inverse recovery.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RecoveryReport {
    /// sup ‖X − (Y×grad f − μfY)‖∞ over samples
    pub reconstruction_residual: f64,
    /// sup |Δf − μ(μ−κ)f| over samples
    pub eigen_residual: f64,
}

/// Recover the scalar behind a commuting Beltrami field: f := −g(Y,X)/(cμ),
/// reporting the reconstruction and eigenvalue residuals.
pub fn recover_scalar(
    entry: &KillingEntry,
    x: &VectorField,
    mu: f64,
) -> Result<(ScalarField, RecoveryReport)> {
    recover_scalar_with(entry, x, mu, FdConfig::default())
}

/// recover_scalar with an explicit FD configuration for the residual
/// measurements (convergence studies halve the step).
pub fn recover_scalar_with(
    entry: &KillingEntry,
    x: &VectorField,
    mu: f64,
    cfg: FdConfig,
) -> Result<(ScalarField, RecoveryReport)> {
    if mu == 0.0 {
        return Err(Error::ZeroEigenvalue);
    }
    let kappa = entry.kappa.ok_or_else(|| Error::NotBeltramiKilling(entry.name.to_string()))?;
    let c = entry.c.ok_or_else(|| Error::NotBeltramiKilling(entry.name.to_string()))?;
    let product = calculus::scalar_product_field(&entry.model, &entry.field, x);
    let scale = -1.0 / (c * mu);
    let f = if product.has_partials() {
        let p1 = product.clone();
        let p2 = product.clone();
        ScalarField::with_partials(
            move |q: &ChartPoint| p1.value(q) * scale,
            move |q: &ChartPoint| {
                linalg::scale(p2.partials_at(q, FdConfig::default()).expect("analytic"), scale)
            },
        )
    } else {
        let p1 = product.clone();
        ScalarField::new(move |q: &ChartPoint| p1.value(q) * scale)
    };

    let mut reconstruction = 0.0f64;
    let mut eigen = 0.0f64;
    for p in entry.sample_points(3) {
        let grad_f = calculus::grad(&entry.model, &f, &p, cfg)?;
        let yv = entry.field.value(&p);
        let rebuilt = linalg::sub(
            calculus::cross(&entry.model, &p, yv, grad_f),
            linalg::scale(yv, mu * f.value(&p)),
        );
        reconstruction =
            reconstruction.max(linalg::norm_inf(linalg::sub(x.value(&p), rebuilt)));
        let lap = calculus::laplacian(&entry.model, &f, &p, cfg)?;
        eigen = eigen.max((lap - mu * (mu - kappa) * f.value(&p)).abs());
    }
    Ok((f, RecoveryReport { reconstruction_residual: reconstruction, eigen_residual: eigen }))
}
