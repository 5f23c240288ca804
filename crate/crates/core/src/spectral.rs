//! Band-limited calculus on the unit flat 3-torus via truncated Fourier
//! series: exact curl and its inverse on mean-free divergence-free fields,
//! synthesis/analysis against uniform grids, helicity.
//!
//! Conventions: unit periods, modes k ∈ {−N..N}³, angular wavevector 2πk,
//! real fields stored with Hermitian symmetry coeff(−k) = conj(coeff(k)).

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::linalg::{self, Vec3};
use crate::manifold::ChartPoint;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// Tolerance for the divergence-free / mean-free preconditions.
pub const SPECTRAL_TOL: f64 = 1e-12;

fn side(n: usize) -> usize {
    2 * n + 1
}

fn index_of(n: usize, k: [i64; 3]) -> usize {
    let m = side(n) as i64;
    let a = k[0] + n as i64;
    let b = k[1] + n as i64;
    let c = k[2] + n as i64;
    ((a * m + b) * m + c) as usize
}

/// All mode indices in lexicographic order.
pub fn modes(n: usize) -> impl Iterator<Item = [i64; 3]> {
    let ni = n as i64;
    (-ni..=ni).flat_map(move |a| {
        (-ni..=ni).flat_map(move |b| (-ni..=ni).map(move |c| [a, b, c]))
    })
}

fn k_as_vec(k: [i64; 3]) -> Vec3 {
    [k[0] as f64, k[1] as f64, k[2] as f64]
}

/// Per-axis phase table e^{2πi k x} for k = −n..n.
fn phase_table(n: usize, x: f64) -> Vec<Complex64> {
    let ni = n as i64;
    (-ni..=ni)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 * x))
        .collect()
}

/// Scalar field as truncated Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(n: usize) -> Self {
        SpectralScalar { n, coeffs: vec![Complex64::ZERO; side(n).pow(3)] }
    }

    /// A·cos(2πk·x), stored as A/2 at ±k.
    pub fn cosine(n: usize, k: [i64; 3], amplitude: f64) -> Self {
        let mut f = Self::zeros(n);
        let half = Complex64::new(amplitude / 2.0, 0.0);
        *f.get_mut(k) = *f.get(k) + half;
        *f.get_mut([-k[0], -k[1], -k[2]]) = *f.get([-k[0], -k[1], -k[2]]) + half;
        f
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: [i64; 3]) -> &Complex64 {
        &self.coeffs[index_of(self.n, k)]
    }

    pub fn get_mut(&mut self, k: [i64; 3]) -> &mut Complex64 {
        &mut self.coeffs[index_of(self.n, k)]
    }

    pub fn mean(&self) -> Complex64 {
        *self.get([0, 0, 0])
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn value_at(&self, x: Vec3) -> f64 {
        let t = [
            phase_table(self.n, x[0]),
            phase_table(self.n, x[1]),
            phase_table(self.n, x[2]),
        ];
        let ni = self.n as i64;
        let mut acc = Complex64::ZERO;
        for a in -ni..=ni {
            for b in -ni..=ni {
                let pab = t[0][(a + ni) as usize] * t[1][(b + ni) as usize];
                for c in -ni..=ni {
                    acc += self.coeffs[index_of(self.n, [a, b, c])] * pab * t[2][(c + ni) as usize];
                }
            }
        }
        acc.re
    }

    /// Exact coordinate partials by spectral differentiation.
    pub fn partials_at(&self, x: Vec3) -> Vec3 {
        let t = [
            phase_table(self.n, x[0]),
            phase_table(self.n, x[1]),
            phase_table(self.n, x[2]),
        ];
        let ni = self.n as i64;
        let mut acc = [Complex64::ZERO; 3];
        for a in -ni..=ni {
            for b in -ni..=ni {
                let pab = t[0][(a + ni) as usize] * t[1][(b + ni) as usize];
                for c in -ni..=ni {
                    let e = self.coeffs[index_of(self.n, [a, b, c])] * pab * t[2][(c + ni) as usize];
                    let ik = Complex64::new(0.0, TAU);
                    acc[0] += e * ik * a as f64;
                    acc[1] += e * ik * b as f64;
                    acc[2] += e * ik * c as f64;
                }
            }
        }
        [acc[0].re, acc[1].re, acc[2].re]
    }

    /// Positive Laplacian: multiply each mode by |2πk|².
    pub fn laplacian(&self) -> SpectralScalar {
        let mut out = self.clone();
        for k in modes(self.n) {
            let ksq = TAU * TAU * linalg::dot(k_as_vec(k), k_as_vec(k));
            *out.get_mut(k) = *self.get(k) * ksq;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> SpectralScalar {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        modes(self.n).all(|k| {
            let a = *self.get(k);
            let b = self.get([-k[0], -k[1], -k[2]]).conj();
            (a - b).norm() <= tol
        })
    }

    /// Chart-point field with exact derivatives (torus main chart).
    pub fn to_scalar_field(&self) -> ScalarField {
        let f = self.clone();
        let g = self.clone();
        ScalarField::with_partials(
            move |p: &ChartPoint| f.value_at(p.coords),
            move |p: &ChartPoint| g.partials_at(p.coords),
        )
    }

    /// Largest |f̂| together with its mode (lexicographically first maximizer).
    pub fn dominant_mode(&self) -> ([i64; 3], f64) {
        let mut best = ([0i64; 3], -1.0);
        for k in modes(self.n) {
            let m = self.get(k).norm();
            if m > best.1 + 1e-18 {
                best = (k, m);
            }
        }
        best
    }
}

/// Divergence-free-capable vector field as truncated Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n: usize,
    coeffs: Vec<[Complex64; 3]>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        SpectralField { n, coeffs: vec![[Complex64::ZERO; 3]; side(n).pow(3)] }
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: [i64; 3]) -> &[Complex64; 3] {
        &self.coeffs[index_of(self.n, k)]
    }

    pub fn get_mut(&mut self, k: [i64; 3]) -> &mut [Complex64; 3] {
        &mut self.coeffs[index_of(self.n, k)]
    }

    /// Set coefficients at k and the conjugate at −k (keeps the field real).
    pub fn set_conjugate_pair(&mut self, k: [i64; 3], value: [Complex64; 3]) {
        *self.get_mut(k) = value;
        let conj = [value[0].conj(), value[1].conj(), value[2].conj()];
        *self.get_mut([-k[0], -k[1], -k[2]]) = conj;
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        modes(self.n).all(|k| {
            let a = self.get(k);
            let b = self.get([-k[0], -k[1], -k[2]]);
            (0..3).all(|i| (a[i] - b[i].conj()).norm() <= tol)
        })
    }

    /// max_k |k·X̂(k)| (zero for divergence-free fields).
    pub fn divergence_residual(&self) -> f64 {
        modes(self.n)
            .map(|k| {
                let c = self.get(k);
                let kv = k_as_vec(k);
                (c[0] * kv[0] + c[1] * kv[1] + c[2] * kv[2]).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn mean_magnitude(&self) -> f64 {
        self.get([0, 0, 0]).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn require_admissible(&self, what: &str) -> Result<()> {
        if self.mean_magnitude() > SPECTRAL_TOL {
            return Err(Error::SpectralPrecondition(format!(
                "{what}: field has a nonzero mean mode (|X̂(0)| = {:.3e})",
                self.mean_magnitude()
            )));
        }
        let d = self.divergence_residual();
        let scale = self.l2_norm_sq().sqrt().max(1.0);
        if d > SPECTRAL_TOL * scale.max(1.0) * 10.0 {
            return Err(Error::SpectralPrecondition(format!(
                "{what}: field is not divergence-free (max |k·X̂| = {d:.3e})"
            )));
        }
        Ok(())
    }

    /// Exact curl: per mode i(2πk) × X̂(k).
    pub fn curl(&self) -> SpectralField {
        let mut out = SpectralField::zeros(self.n);
        for k in modes(self.n) {
            let c = self.get(k);
            let kv = linalg::scale(k_as_vec(k), TAU);
            let i = Complex64::new(0.0, 1.0);
            let v = [
                i * (kv[1] * c[2] - kv[2] * c[1]),
                i * (kv[2] * c[0] - kv[0] * c[2]),
                i * (kv[0] * c[1] - kv[1] * c[0]),
            ];
            *out.get_mut(k) = v;
        }
        out
    }

    /// Exact curl⁻¹ onto mean-free divergence-free fields:
    /// Â(k) = i(2πk × X̂(k))/|2πk|², k ≠ 0. Requires X mean-free and
    /// divergence-free; the result satisfies curl(Â) = X̂ exactly and is again
    /// mean-free and divergence-free.
    pub fn curl_inv(&self) -> Result<SpectralField> {
        self.require_admissible("curl_inv")?;
        let mut out = SpectralField::zeros(self.n);
        for k in modes(self.n) {
            if k == [0, 0, 0] {
                continue;
            }
            let c = self.get(k);
            let kv = linalg::scale(k_as_vec(k), TAU);
            let ksq = linalg::dot(kv, kv);
            let i = Complex64::new(0.0, 1.0);
            let v = [
                i * (kv[1] * c[2] - kv[2] * c[1]) / ksq,
                i * (kv[2] * c[0] - kv[0] * c[2]) / ksq,
                i * (kv[0] * c[1] - kv[1] * c[0]) / ksq,
            ];
            *out.get_mut(k) = v;
        }
        Ok(out)
    }

    /// Helicity H(X) = ⟨X, curl⁻¹X⟩_{L²} (real for Hermitian-symmetric X).
    pub fn helicity(&self) -> Result<f64> {
        let a = self.curl_inv()?;
        let mut acc = Complex64::ZERO;
        for k in modes(self.n) {
            let x = self.get(k);
            let av = a.get(k);
            for i in 0..3 {
                acc += x[i].conj() * av[i];
            }
        }
        Ok(acc.re)
    }

    /// L² inner product ⟨X, Y⟩ = Σ_k conj(X̂)·Ŷ (real part).
    pub fn l2_inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.n, other.n, "truncation mismatch");
        let mut acc = Complex64::ZERO;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            for i in 0..3 {
                acc += a[i].conj() * b[i];
            }
        }
        acc.re
    }

    /// sup-norm of coefficient difference (fields may differ in truncation
    /// only if one embeds in the other).
    pub fn coeff_sup_distance(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.n, other.n, "truncation mismatch");
        let mut m = 0.0f64;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            for i in 0..3 {
                m = m.max((a[i] - b[i]).norm());
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().flatten() {
            *c *= s;
        }
        out
    }

    pub fn value_at(&self, x: Vec3) -> Vec3 {
        let t = [
            phase_table(self.n, x[0]),
            phase_table(self.n, x[1]),
            phase_table(self.n, x[2]),
        ];
        let ni = self.n as i64;
        let mut acc = [Complex64::ZERO; 3];
        for a in -ni..=ni {
            for b in -ni..=ni {
                let pab = t[0][(a + ni) as usize] * t[1][(b + ni) as usize];
                for c in -ni..=ni {
                    let e = pab * t[2][(c + ni) as usize];
                    let co = self.get([a, b, c]);
                    for i in 0..3 {
                        acc[i] += co[i] * e;
                    }
                }
            }
        }
        [acc[0].re, acc[1].re, acc[2].re]
    }

    /// Exact Jacobian `J[i][j] = ∂_j X^i` by spectral differentiation.
    pub fn jacobian_at(&self, x: Vec3) -> [[f64; 3]; 3] {
        let t = [
            phase_table(self.n, x[0]),
            phase_table(self.n, x[1]),
            phase_table(self.n, x[2]),
        ];
        let ni = self.n as i64;
        let mut acc = [[Complex64::ZERO; 3]; 3];
        for a in -ni..=ni {
            for b in -ni..=ni {
                let pab = t[0][(a + ni) as usize] * t[1][(b + ni) as usize];
                for c in -ni..=ni {
                    let e = pab * t[2][(c + ni) as usize];
                    let co = self.get([a, b, c]);
                    let ik = [
                        Complex64::new(0.0, TAU * a as f64),
                        Complex64::new(0.0, TAU * b as f64),
                        Complex64::new(0.0, TAU * c as f64),
                    ];
                    for i in 0..3 {
                        for j in 0..3 {
                            acc[i][j] += co[i] * ik[j] * e;
                        }
                    }
                }
            }
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = acc[i][j].re;
            }
        }
        out
    }

    /// Chart-point field with exact derivatives (torus main chart).
    pub fn to_vector_field(&self) -> VectorField {
        let f = self.clone();
        let g = self.clone();
        VectorField::with_jacobian(
            move |p: &ChartPoint| f.value_at(p.coords),
            move |p: &ChartPoint| g.jacobian_at(p.coords),
        )
    }

    /// g(X, v) for a constant v on the flat torus, as a spectral scalar.
    pub fn dot_constant(&self, v: Vec3) -> SpectralScalar {
        let mut out = SpectralScalar::zeros(self.n);
        for k in modes(self.n) {
            let c = self.get(k);
            *out.get_mut(k) = c[0] * v[0] + c[1] * v[1] + c[2] * v[2];
        }
        out
    }

    /// Random real mean-free divergence-free band-limited field (unit-ish
    /// amplitude), for tests and identity suites.
    pub fn random_divergence_free(n: usize, rng: &mut impl Rng) -> SpectralField {
        let mut out = SpectralField::zeros(n);
        let ni = n as i64;
        for k in modes(n) {
            // fill one representative of each ±pair, skip zero
            if k == [0, 0, 0] || !is_lex_positive(k) {
                continue;
            }
            let _ = ni;
            let kv = k_as_vec(k);
            let raw = [
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ];
            // project out the longitudinal part: X̂ ← X̂ − k (k·X̂)/|k|²
            let kdot = raw[0] * kv[0] + raw[1] * kv[1] + raw[2] * kv[2];
            let ksq = linalg::dot(kv, kv);
            let proj = [
                raw[0] - kdot * kv[0] / ksq,
                raw[1] - kdot * kv[1] / ksq,
                raw[2] - kdot * kv[2] / ksq,
            ];
            out.set_conjugate_pair(k, proj);
        }
        out
    }
}

/// True for the lexicographically positive representative of a ±k pair.
pub fn is_lex_positive(k: [i64; 3]) -> bool {
    if k[0] != 0 {
        return k[0] > 0;
    }
    if k[1] != 0 {
        return k[1] > 0;
    }
    k[2] > 0
}

// ---------------------------------------------------------------------------
// grid analysis / synthesis (naive separable DFT; desk scale N ≤ 16)
// ---------------------------------------------------------------------------

/// Uniform sampling grid x = (i/m, j/m, l/m), index ((i·m)+j)·m+l.
pub fn grid_points(m: usize) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                pts.push([i as f64 / m as f64, j as f64 / m as f64, l as f64 / m as f64]);
            }
        }
    }
    pts
}

/// Forward DFT of scalar samples on the m³ grid onto modes −n..n per axis.
/// Exact for band-limited input when m ≥ 2n+1; coarser grids are rejected.
pub fn analyze_scalar(samples: &[f64], m: usize, n: usize) -> Result<SpectralScalar> {
    if m < side(n) {
        return Err(Error::GridTooCoarse { m, min: side(n) });
    }
    if samples.len() != m * m * m {
        return Err(Error::InvalidArgument(format!(
            "expected {} samples for an m={} grid, got {}",
            m * m * m,
            m,
            samples.len()
        )));
    }
    let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let coeffs = dft3_forward(&complex, m, n);
    Ok(SpectralScalar { n, coeffs })
}

/// Forward DFT of vector samples (component-wise).
pub fn analyze_vector(samples: &[Vec3], m: usize, n: usize) -> Result<SpectralField> {
    if m < side(n) {
        return Err(Error::GridTooCoarse { m, min: side(n) });
    }
    if samples.len() != m * m * m {
        return Err(Error::InvalidArgument(format!(
            "expected {} samples for an m={} grid, got {}",
            m * m * m,
            m,
            samples.len()
        )));
    }
    let mut out = SpectralField::zeros(n);
    for comp in 0..3 {
        let complex: Vec<Complex64> =
            samples.iter().map(|v| Complex64::new(v[comp], 0.0)).collect();
        let coeffs = dft3_forward(&complex, m, n);
        for (slot, c) in out.coeffs.iter_mut().zip(coeffs) {
            slot[comp] = c;
        }
    }
    Ok(out)
}

/// Separable forward transform: f̂(k) = (1/m³) Σ_j f(x_j) e^{−2πi k·j/m}.
fn dft3_forward(values: &[Complex64], m: usize, n: usize) -> Vec<Complex64> {
    let ni = n as i64;
    let nm = side(n);
    // twiddle table: w[k+n][j] = e^{−2πi k j / m}
    let tw: Vec<Vec<Complex64>> = (-ni..=ni)
        .map(|k| {
            (0..m)
                .map(|j| Complex64::from_polar(1.0, -TAU * k as f64 * j as f64 / m as f64))
                .collect()
        })
        .collect();
    // axis 2 (l), then axis 1 (j), then axis 0 (i)
    let mut pass1 = vec![Complex64::ZERO; m * m * nm];
    for i in 0..m {
        for j in 0..m {
            for (kc, twk) in tw.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for l in 0..m {
                    acc += values[(i * m + j) * m + l] * twk[l];
                }
                pass1[(i * m + j) * nm + kc] = acc;
            }
        }
    }
    let mut pass2 = vec![Complex64::ZERO; m * nm * nm];
    for i in 0..m {
        for kc in 0..nm {
            for (kb, twk) in tw.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for j in 0..m {
                    acc += pass1[(i * m + j) * nm + kc] * twk[j];
                }
                pass2[(i * nm + kb) * nm + kc] = acc;
            }
        }
    }
    let mut out = vec![Complex64::ZERO; nm * nm * nm];
    let scale = 1.0 / (m as f64).powi(3);
    for kb in 0..nm {
        for kc in 0..nm {
            for (ka, twk) in tw.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for i in 0..m {
                    acc += pass2[(i * nm + kb) * nm + kc] * twk[i];
                }
                out[(ka * nm + kb) * nm + kc] = acc * scale;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// serialization (versioned JSON; exact f64 round-trip via shortest repr)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModeRow {
    k: [i64; 3],
    re: [f64; 3],
    im: [f64; 3],
}

#[derive(Serialize, Deserialize)]
pub struct SpectralFieldDoc {
    pub schema: String,
    pub n: usize,
    pub period: [f64; 3],
    modes: Vec<ModeRow>,
}

pub const SPECTRAL_SCHEMA: &str = "spectral-field/1";

impl SpectralField {
    pub fn to_doc(&self) -> SpectralFieldDoc {
        let mut rows = Vec::new();
        for k in modes(self.n) {
            let c = self.get(k);
            if c.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            rows.push(ModeRow {
                k,
                re: [c[0].re, c[1].re, c[2].re],
                im: [c[0].im, c[1].im, c[2].im],
            });
        }
        SpectralFieldDoc {
            schema: SPECTRAL_SCHEMA.to_string(),
            n: self.n,
            period: [1.0, 1.0, 1.0],
            modes: rows,
        }
    }

    pub fn from_doc(doc: &SpectralFieldDoc) -> Result<SpectralField> {
        if doc.schema != SPECTRAL_SCHEMA {
            return Err(Error::InvalidArgument(format!(
                "unsupported spectral schema '{}'",
                doc.schema
            )));
        }
        let mut out = SpectralField::zeros(doc.n);
        for row in &doc.modes {
            if row.k.iter().any(|&ki| ki.unsigned_abs() as usize > doc.n) {
                return Err(Error::InvalidArgument(format!(
                    "mode {:?} outside truncation {}",
                    row.k, doc.n
                )));
            }
            *out.get_mut(row.k) = [
                Complex64::new(row.re[0], row.im[0]),
                Complex64::new(row.re[1], row.im[1]),
                Complex64::new(row.re[2], row.im[2]),
            ];
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// The closed-form 2.5D eigenfield X = (0, −2π sin 2πx, −2π cos 2πx),
    /// curl X = 2πX.
    pub fn golden_two_half_d() -> SpectralField {
        let mut x = SpectralField::zeros(1);
        // −2π sin(2πx) e₂ = πi(e^{2πix} − e^{−2πix}) e₂
        // −2π cos(2πx) e₃ = −π(e^{2πix} + e^{−2πix}) e₃
        x.set_conjugate_pair(
            [1, 0, 0],
            [
                Complex64::ZERO,
                Complex64::new(0.0, PI),
                Complex64::new(-PI, 0.0),
            ],
        );
        x
    }

    #[test]
    fn golden_field_matches_closed_form() {
        let x = golden_two_half_d();
        for &px in &[0.0, 0.125, 0.37, 0.9] {
            let v = x.value_at([px, 0.4, 0.7]);
            let expect = [0.0, -TAU * (TAU * px).sin(), -TAU * (TAU * px).cos()];
            assert!(linalg::norm_inf(linalg::sub(v, expect)) < 1e-13);
        }
        assert!((x.l2_norm_sq() - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn golden_field_is_beltrami_2pi() {
        let x = golden_two_half_d();
        let c = x.curl();
        assert!(c.coeff_sup_distance(&x.scaled(TAU)) < 1e-12);
    }

    #[test]
    fn curl_of_single_mode_cosine() {
        // X = cos(2πx) e₂: curl = (0, 0, −2π sin 2πx)
        let mut x = SpectralField::zeros(1);
        x.set_conjugate_pair([1, 0, 0], [Complex64::ZERO, Complex64::new(0.5, 0.0), Complex64::ZERO]);
        let c = x.curl();
        for &px in &[0.1, 0.33] {
            let v = c.value_at([px, 0.0, 0.0]);
            let expect = [0.0, 0.0, -TAU * (TAU * px).sin()];
            assert!(linalg::norm_inf(linalg::sub(v, expect)) < 1e-13);
        }
        // constant field has zero curl
        let mut konst = SpectralField::zeros(1);
        *konst.get_mut([0, 0, 0]) = [Complex64::new(1.0, 0.0); 3];
        assert!(konst.curl().l2_norm_sq() < 1e-28);
    }

    #[test]
    fn curl_inv_is_right_inverse_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = SpectralField::random_divergence_free(3, &mut rng);
            let a = x.curl_inv().unwrap();
            assert!(a.curl().coeff_sup_distance(&x) < 1e-12);
            assert!(a.mean_magnitude() < 1e-15);
            assert!(a.divergence_residual() < 1e-12);
            // and the left inverse on the curl image
            let back = x.curl().curl_inv().unwrap();
            assert!(back.coeff_sup_distance(&x) < 1e-12);
        }
    }

    #[test]
    fn curl_inv_single_mode_hand_value() {
        // k = (0,1,0), polarization e₃: Â = i(k̂×X̂)/(2π|k|) = i(e₂×e₃)/(2π) = i e₁/(2π)
        let mut x = SpectralField::zeros(1);
        x.set_conjugate_pair([0, 1, 0], [Complex64::ZERO, Complex64::ZERO, Complex64::new(1.0, 0.0)]);
        let a = x.curl_inv().unwrap();
        let c = a.get([0, 1, 0]);
        assert!((c[0] - Complex64::new(0.0, 1.0 / TAU)).norm() < 1e-15);
        assert!(c[1].norm() < 1e-15 && c[2].norm() < 1e-15);
    }

    #[test]
    fn curl_inv_rejects_mean_or_divergence() {
        let mut x = SpectralField::zeros(1);
        *x.get_mut([0, 0, 0]) = [Complex64::new(1.0, 0.0); 3];
        assert!(matches!(x.curl_inv(), Err(Error::SpectralPrecondition(_))));
        let mut y = SpectralField::zeros(1);
        // longitudinal mode: X̂ ∝ k
        y.set_conjugate_pair([1, 0, 0], [Complex64::new(1.0, 0.0), Complex64::ZERO, Complex64::ZERO]);
        assert!(matches!(y.curl_inv(), Err(Error::SpectralPrecondition(_))));
    }

    #[test]
    fn curl_inv_of_beltrami_field_divides_by_eigenvalue() {
        let x = golden_two_half_d();
        let a = x.curl_inv().unwrap();
        assert!(a.coeff_sup_distance(&x.scaled(1.0 / TAU)) < 1e-13);
    }

    #[test]
    fn helicity_of_golden_field_and_mirror() {
        let x = golden_two_half_d();
        let h = x.helicity().unwrap();
        assert!((h - TAU).abs() < 1e-12, "helicity {h}");
        // opposite-chirality single mode: flip the sign of the e₃ part
        let mut m = SpectralField::zeros(1);
        m.set_conjugate_pair(
            [1, 0, 0],
            [Complex64::ZERO, Complex64::new(0.0, PI), Complex64::new(PI, 0.0)],
        );
        let hm = m.helicity().unwrap();
        assert!((hm + TAU).abs() < 1e-12, "mirror helicity {hm}");
        assert!(SpectralField::zeros(2).helicity().unwrap().abs() == 0.0);
    }

    #[test]
    fn analyze_synthesize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = SpectralField::random_divergence_free(2, &mut rng);
        let m = 2 * 2 + 1;
        let samples: Vec<Vec3> = grid_points(m).iter().map(|&p| x.value_at(p)).collect();
        let back = analyze_vector(&samples, m, 2).unwrap();
        assert!(back.coeff_sup_distance(&x) < 1e-12);
        // oversampled grid also exact
        let m2 = 8;
        let samples2: Vec<Vec3> = grid_points(m2).iter().map(|&p| x.value_at(p)).collect();
        let back2 = analyze_vector(&samples2, m2, 2).unwrap();
        assert!(back2.coeff_sup_distance(&x) < 1e-12);
    }

    #[test]
    fn analyze_rejects_coarse_grid() {
        let samples = vec![0.0; 4 * 4 * 4];
        assert!(matches!(
            analyze_scalar(&samples, 4, 2),
            Err(Error::GridTooCoarse { m: 4, min: 5 })
        ));
    }

    #[test]
    fn scalar_cosine_value_and_partials() {
        let f = SpectralScalar::cosine(2, [1, 0, 0], 1.0);
        for &px in &[0.0, 0.2, 0.77] {
            assert!((f.value_at([px, 0.1, 0.9]) - (TAU * px).cos()).abs() < 1e-14);
            let d = f.partials_at([px, 0.1, 0.9]);
            assert!((d[0] + TAU * (TAU * px).sin()).abs() < 1e-13);
            assert!(d[1].abs() < 1e-13 && d[2].abs() < 1e-13);
        }
        assert!((f.l2_norm_sq() - 0.5).abs() < 1e-15);
        let lap = f.laplacian();
        assert!((lap.value_at([0.2, 0.0, 0.0]) - TAU * TAU * (TAU * 0.2).cos()).abs() < 1e-12);
    }

    #[test]
    fn zero_field_synthesizes_to_zero() {
        let z = SpectralField::zeros(3);
        assert_eq!(z.value_at([0.3, 0.1, 0.9]), [0.0; 3]);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = SpectralField::random_divergence_free(2, &mut rng);
        let doc = x.to_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: SpectralFieldDoc = serde_json::from_str(&text).unwrap();
        let back = SpectralField::from_doc(&parsed).unwrap();
        assert_eq!(x, back, "bit-exact round trip");
    }
}
