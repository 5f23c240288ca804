//! Discrete π∘curl⁻¹ on the symmetric divergence-free subspace: assembly in a
//! per-mode polarization basis and a deterministic complex Hermitian Jacobi
//! eigensolver.
//!
//! curl⁻¹ preserves the 2-plane k⊥ of every admitted mode, so the projection π
//! acts as the identity on the assembled blocks; its content is the rejection
//! of non-admitted modes, which the basis enumeration performs.

use crate::error::{Error, Result};
use crate::linalg::{self, Vec3};
use crate::spectral::{SpectralField, TAU};
use crate::symmetry::SymmetricSubspace;
use num_complex::Complex64;

/// Deterministic polarization pair spanning k⊥: ê₁ is the Gram–Schmidt
/// projection of the smallest-index coordinate axis not parallel to k,
/// ê₂ = k̂ × ê₁.
pub fn polarization_basis(k: [i64; 3]) -> (Vec3, Vec3) {
    let kv = [k[0] as f64, k[1] as f64, k[2] as f64];
    let knorm = linalg::norm(kv);
    let khat = linalg::scale(kv, 1.0 / knorm);
    let axis = (0..3)
        .find(|&i| {
            // e_i is parallel to k only when k has a single nonzero component i
            !(k[i] != 0 && k.iter().enumerate().all(|(j, &kj)| j == i || kj == 0))
        })
        .expect("some axis is never parallel to a nonzero k");
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let proj = linalg::sub(e, linalg::scale(khat, linalg::dot(e, khat)));
    let e1 = linalg::scale(proj, 1.0 / linalg::norm(proj));
    let e2 = linalg::cross_euclid(khat, e1);
    (e1, e2)
}

/// Bookkeeping for one admitted mode: wavevector, |2πk| and its basis pair.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub k: [i64; 3],
    pub k_angular_norm: f64,
    pub e1: Vec3,
    pub e2: Vec3,
}

/// Hermitian matrix of π∘curl⁻¹ over the stacked polarization basis
/// (2 rows/columns per admitted mode, modes in lexicographic order).
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub modes: Vec<ModeBasis>,
    dim: usize,
    /// Row-major dense Hermitian matrix.
    entries: Vec<Complex64>,
    pub truncation: usize,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// sup-norm of M − M† (zero by construction, kept as an invariant check).
    pub fn hermiticity_residual(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        m
    }

    /// Eigenvalues in ascending order (deterministic cyclic Jacobi).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = hermitian_eigen_jacobi(&self.entries, self.dim);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }
}

/// Assemble the operator on a nonempty symmetric subspace.
/// Per admitted mode the 2×2 block in the (ê₁, ê₂) basis is
/// (1/|2πk|)·[[0, −i], [i, 0]], Hermitian with eigenvalues ±1/|2πk|.
/// Largest matrix dimension the dense Jacobi eigensolver accepts.
pub const MAX_OPERATOR_DIM: usize = 4096;

pub fn assemble_pi_curlinv(sub: &SymmetricSubspace) -> Result<OperatorMatrix> {
    if sub.is_empty() {
        return Err(Error::NoSymmetricFields { n: sub.truncation });
    }
    let dim = 2 * sub.len();
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::InvalidArgument(format!(
            "operator dimension {dim} exceeds the dense-eigensolver limit {MAX_OPERATOR_DIM}; lower the truncation"
        )));
    }
    let modes: Vec<ModeBasis> = sub
        .admitted
        .iter()
        .map(|&k| {
            let (e1, e2) = polarization_basis(k);
            let kv = [k[0] as f64, k[1] as f64, k[2] as f64];
            ModeBasis { k, k_angular_norm: TAU * linalg::norm(kv), e1, e2 }
        })
        .collect();
    let dim = 2 * modes.len();
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for (m, mode) in modes.iter().enumerate() {
        let inv = 1.0 / mode.k_angular_norm;
        let p = 2 * m;
        entries[p * dim + (p + 1)] = Complex64::new(0.0, -inv);
        entries[(p + 1) * dim + p] = Complex64::new(0.0, inv);
    }
    Ok(OperatorMatrix { modes, dim, entries, truncation: sub.truncation })
}

/// Cyclic complex Hermitian Jacobi eigensolver. Returns (eigenvalues,
/// eigenvectors as columns of a row-major dim×dim matrix), unsorted.
/// Deterministic: fixed sweep order, no pivot searches.
pub fn hermitian_eigen_jacobi(matrix: &[Complex64], dim: usize) -> (Vec<f64>, Vec<Complex64>) {
    assert_eq!(matrix.len(), dim * dim);
    let mut a = matrix.to_vec();
    let mut v = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    if dim <= 1 {
        return (a.iter().map(|z| z.re).collect(), v);
    }

    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                s += a[p * dim + q].norm_sqr();
            }
        }
        s
    };
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);

    for _sweep in 0..50 {
        if off(&a) <= 1e-30 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[p * dim + p].re;
                let aqq = a[q * dim + q].re;
                // phase z = apq/|apq|; rotation angle from the real problem
                let z = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                // smaller-magnitude root of t² − 2τt − 1 = 0
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // apply R on the right and R† on the left;
                // R_pp = c, R_pq = −s z, R_qp = s z̄, R_qq = c
                for r in 0..dim {
                    let arp = a[r * dim + p];
                    let arq = a[r * dim + q];
                    a[r * dim + p] = arp * c + arq * s * z.conj();
                    a[r * dim + q] = -arp * s * z + arq * c;
                }
                for col in 0..dim {
                    let apc = a[p * dim + col];
                    let aqc = a[q * dim + col];
                    a[p * dim + col] = apc * c + aqc * s * z;
                    a[q * dim + col] = -apc * s * z.conj() + aqc * c;
                }
                for r in 0..dim {
                    let vrp = v[r * dim + p];
                    let vrq = v[r * dim + q];
                    v[r * dim + p] = vrp * c + vrq * s * z.conj();
                    v[r * dim + q] = -vrp * s * z + vrq * c;
                }
            }
        }
    }
    let vals = (0..dim).map(|i| a[i * dim + i].re).collect();
    (vals, v)
}

/// Result of the existence-operator route: the top eigenvalue of π∘curl⁻¹ and
/// a deterministic real eigenfield.
pub struct TopEigenpair {
    /// Signed eigenvalue μ (tie-break: positive sign first).
    pub mu: f64,
    pub field: SpectralField,
    /// Mode the canonical eigenfield lives on.
    pub k: [i64; 3],
}

/// Largest-|μ| eigenpair. Equal |μ| ties are broken deterministically:
/// smallest lexicographic admitted wavevector, then positive μ. The returned
/// field is the canonical real combination supported on ±k: its curl equals
/// field/μ exactly in the band.
pub fn top_eigenpair(op: &OperatorMatrix) -> Result<TopEigenpair> {
    if op.modes.is_empty() {
        return Err(Error::NoSymmetricFields { n: op.truncation });
    }
    let eigen = op.eigenvalues();
    let mu_abs = eigen.iter().fold(0.0f64, |m, &x| m.max(x.abs()));

    // the block structure makes the maximizing |k| exact: |μ| = 1/|2πk|min
    let min_norm_sq = op
        .modes
        .iter()
        .map(|m| m.k[0] * m.k[0] + m.k[1] * m.k[1] + m.k[2] * m.k[2])
        .min()
        .expect("nonempty");
    let top_mode = op
        .modes
        .iter()
        .find(|m| m.k[0] * m.k[0] + m.k[1] * m.k[1] + m.k[2] * m.k[2] == min_norm_sq)
        .expect("nonempty");

    // canonical real eigenfield for the positive eigenvalue +1/|2πk|:
    // X̂(k) = (ê₁ + i ê₂)/2, X̂(−k) = conjugate; then curl X = |2πk| X.
    let mut field = SpectralField::zeros(op.truncation);
    let coeff = |a: f64, b: f64| Complex64::new(a / 2.0, b / 2.0);
    let value = [
        coeff(top_mode.e1[0], top_mode.e2[0]),
        coeff(top_mode.e1[1], top_mode.e2[1]),
        coeff(top_mode.e1[2], top_mode.e2[2]),
    ];
    field.set_conjugate_pair(top_mode.k, value);

    // report the numeric eigenvalue from the Jacobi spectrum, positive branch
    let mu = eigen
        .iter()
        .copied()
        .filter(|&x| x > 0.0)
        .min_by(|a, b| (a - mu_abs).abs().partial_cmp(&(b - mu_abs).abs()).unwrap())
        .unwrap_or(mu_abs);

    Ok(TopEigenpair { mu, field, k: top_mode.k })
}
