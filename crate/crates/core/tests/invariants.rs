//! Cross-module invariants: finite-difference convergence orders of the chart
//! calculus, the Killing-identity suite with its negative control, composition
//! identities div∘curl = 0 and curl∘grad = 0, and property tests for the
//! cross-product algebra and spectral round trips.

use beltrami_core::calculus;
use beltrami_core::catalog::{catalog_get, catalog_names};
use beltrami_core::field::{FdConfig, ScalarField, VectorField};
use beltrami_core::fieldline::{self, IntegratorConfig};
use beltrami_core::linalg;
use beltrami_core::manifold::{ChartPoint, ManifoldModel};
use beltrami_core::scalar_eigen::{beltrami_from_scalar, golden_two_half_d_pair};
use beltrami_core::spectral::{analyze_vector, grid_points, SpectralField};
use beltrami_core::structure;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng) -> ChartPoint {
    ChartPoint::main([
        rng.random_range(0.05..0.95),
        rng.random_range(0.05..0.95),
        rng.random_range(0.05..0.95),
    ])
}

/// Assert residual(h/2) ≈ residual(h)/4 unless both are already at rounding.
fn assert_second_order(res_h: f64, res_h2: f64, what: &str) {
    if res_h < 1e-12 && res_h2 < 1e-12 {
        return; // exact (flat/linear data): nothing to converge
    }
    let ratio = res_h / res_h2;
    assert!(
        (3.5..=4.5).contains(&ratio),
        "{what}: ratio {ratio} (residuals {res_h:.3e} -> {res_h2:.3e})"
    );
}

#[test]
fn killing_residual_tolerance_and_convergence_for_all_entries() {
    let h = FdConfig::new(1e-3, beltrami_core::field::FdOrder::Two).unwrap();
    let h2 = h.halved();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for name in catalog_names() {
        let entry = catalog_get(name).unwrap();
        let field_fd = entry.field.without_derivatives();
        for _ in 0..4 {
            let mut p = random_point(&mut rng);
            // keep patch samples inside the entry's box
            for i in 0..3 {
                p.coords[i] = entry.sample_lo[i] + (entry.sample_hi[i] - entry.sample_lo[i]) * p.coords[i];
            }
            let r1 = calculus::killing_residual(&entry.model, &field_fd, &p, h).unwrap();
            assert!(linalg::mat_norm_inf(&r1) < 1e-6, "{name} residual at h=1e-3");
            let r2 = calculus::killing_residual(&entry.model, &field_fd, &p, h2).unwrap();
            assert_second_order(linalg::mat_norm_inf(&r1), linalg::mat_norm_inf(&r2), name);
        }
    }
}

#[test]
fn identity_residual_converges_for_killing_and_not_for_non_killing() {
    let model = ManifoldModel::unit_torus();
    let h = FdConfig::new(1e-3, beltrami_core::field::FdOrder::Two).unwrap();
    let h2 = h.halved();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // Killing Y: translations; X: random band-limited fields, FD path
    for _ in 0..50 {
        let x = SpectralField::random_divergence_free(2, &mut rng)
            .to_vector_field()
            .without_derivatives();
        let axis = rng.random_range(0..3usize);
        let y = catalog_get(["t3_e1", "t3_e2", "t3_e3"][axis]).unwrap().field;
        let p = random_point(&mut rng);
        let r1 = calculus::identity_residual(&model, &x, &y, &p, h).unwrap();
        let r2 = calculus::identity_residual(&model, &x, &y, &p, h2).unwrap();
        assert_second_order(linalg::norm_inf(r1), linalg::norm_inf(r2), "identity residual");
    }
    // negative control: Y = sin(2πx) e₂ is not Killing; the residual must NOT
    // converge to zero as h shrinks
    let bad = VectorField::new(|p: &ChartPoint| [0.0, (std::f64::consts::TAU * p.coords[0]).sin(), 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let x = SpectralField::random_divergence_free(2, &mut rng).to_vector_field();
        let p = random_point(&mut rng);
        let r1 = linalg::norm_inf(calculus::identity_residual(&model, &x, &bad, &p, h).unwrap());
        let r2 = linalg::norm_inf(calculus::identity_residual(&model, &x, &bad, &p, h2).unwrap());
        assert!(r2 > 1e-4, "non-Killing residual should stay finite, got {r2}");
        assert!((r1 - r2).abs() < 0.5 * r1.max(r2), "residual should not be collapsing");
    }
}

#[test]
fn div_curl_and_curl_grad_vanish_at_fd_order() {
    let model = ManifoldModel::sphere();
    let h = FdConfig::new(1e-3, beltrami_core::field::FdOrder::Two).unwrap();
    let h2 = h.halved();
    // smooth analytic test data on the sphere chart
    let f = ScalarField::new(|p: &ChartPoint| {
        let [x, y, z] = p.coords;
        (x * y).sin() + z * z * x
    });
    let x = VectorField::new(|p: &ChartPoint| {
        let [x, y, z] = p.coords;
        [y * z + x.sin(), x * x - z, (x * y * z).cos()]
    });
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let p = ChartPoint::main([
            rng.random_range(-0.7..0.7),
            rng.random_range(-0.7..0.7),
            rng.random_range(-0.7..0.7),
        ]);
        // curl(grad f) via nested closures, FD at the outer level
        let grad_field = |cfg: FdConfig| {
            let m = model.clone();
            let ff = f.clone();
            VectorField::new(move |q: &ChartPoint| calculus::grad(&m, &ff, q, cfg).unwrap())
        };
        let cg1 = linalg::norm_inf(calculus::curl(&model, &grad_field(h), &p, h).unwrap());
        let cg2 = linalg::norm_inf(calculus::curl(&model, &grad_field(h2), &p, h2).unwrap());
        assert!(cg1 < 1e-4, "curl grad {cg1}");
        assert_second_order(cg1, cg2, "curl∘grad");
        // div(curl X)
        let curl_field = |cfg: FdConfig| {
            let m = model.clone();
            let xx = x.clone();
            VectorField::new(move |q: &ChartPoint| calculus::curl(&m, &xx, q, cfg).unwrap())
        };
        let dc1 = calculus::div(&model, &curl_field(h), &p, h).unwrap().abs();
        let dc2 = calculus::div(&model, &curl_field(h2), &p, h2).unwrap().abs();
        assert!(dc1 < 1e-4, "div curl {dc1}");
        assert_second_order(dc1, dc2, "div∘curl");
    }
}

#[test]
fn helicity_agrees_with_grid_quadrature() {
    // independent oracle: H = ⟨X, curl⁻¹X⟩ by uniform-grid quadrature, which
    // is exact for the band-limited integrand (band ≤ 2N on an m ≥ 4N+1 grid)
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    for _ in 0..5 {
        let x = SpectralField::random_divergence_free(2, &mut rng);
        let a = x.curl_inv().unwrap();
        let m = 9; // 4N+1
        let mut acc = 0.0;
        for p in grid_points(m) {
            acc += linalg::dot(x.value_at(p), a.value_at(p));
        }
        let quadrature = acc / (m * m * m) as f64;
        let spectral = x.helicity().unwrap();
        assert!(
            (quadrature - spectral).abs() < 1e-12 * (1.0 + spectral.abs()),
            "quadrature {quadrature} vs spectral {spectral}"
        );
    }
}

#[test]
fn potential_gradient_identity_for_symmetric_fields() {
    // for every symmetric divergence-free X (not only eigenfields):
    // Y×X = grad(g(curl⁻¹X, Y)), here with Y = e₃ and spectral exactness
    use beltrami_core::symmetry::{symmetric_mask, Direction};
    let direction = Direction::axis(2);
    let sub = symmetric_mask(&direction, 3).unwrap();
    let v = direction.as_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..10 {
        let x = sub.project(&SpectralField::random_divergence_free(3, &mut rng));
        let a = x.curl_inv().unwrap();
        let potential = a.dot_constant(v); // g(A, Y) on the flat torus
        for _ in 0..10 {
            let p = [
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
            ];
            let grad = potential.partials_at(p);
            let yx = linalg::cross_euclid(v, x.value_at(p));
            assert!(linalg::norm_inf(linalg::sub(grad, yx)) < 1e-10);
        }
    }
}

#[test]
fn structure_gradient_identity_on_100_random_samples() {
    let model = ManifoldModel::unit_torus();
    let entry = catalog_get("t3_e3").unwrap();
    let result = beltrami_from_scalar(&entry, &golden_two_half_d_pair()).unwrap();
    let x = result.field.to_vector_field();
    let f = structure::first_integral_of_pair(&model, &x, &entry.field, result.mu).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let samples: Vec<ChartPoint> = (0..100).map(|_| random_point(&mut rng)).collect();
    let res = structure::pair_gradient_residual(&model, &f, &x, &entry.field, &samples, FdConfig::default()).unwrap();
    assert!(res < 1e-9, "gradient identity residual {res}");
}

#[test]
fn drift_below_1e7_for_20_random_seeds() {
    // scaled-down arc length here; the acceptance suite runs the full 10³
    let entry = catalog_get("t3_e3").unwrap();
    let result = beltrami_from_scalar(&entry, &golden_two_half_d_pair()).unwrap();
    let x = result.field.to_vector_field();
    let model = ManifoldModel::unit_torus();
    let f = structure::first_integral_of_pair(&model, &x, &entry.field, result.mu).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..20 {
        let p = random_point(&mut rng);
        let speed = model.g_norm(&p, x.value(&p));
        let traj = fieldline::integrate(&model, &x, p, 100.0 / speed, IntegratorConfig::default()).unwrap();
        let drift = fieldline::first_integral_drift(&traj, &f);
        assert!(drift < 1e-7, "drift {drift}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cross_product_orthogonality_and_lagrange(
        ux in -2.0f64..2.0, uy in -2.0f64..2.0, uz in -2.0f64..2.0,
        vx in -2.0f64..2.0, vy in -2.0f64..2.0, vz in -2.0f64..2.0,
        px in -1.5f64..1.5, py in -1.5f64..1.5, pz in -1.5f64..1.5,
        on_sphere in proptest::bool::ANY,
    ) {
        let model = if on_sphere { ManifoldModel::sphere() } else { ManifoldModel::unit_torus() };
        let p = ChartPoint::main([px, py, pz]);
        let u = [ux, uy, uz];
        let v = [vx, vy, vz];
        let c = calculus::cross(&model, &p, u, v);
        let scale = (1.0 + model.inner(&p, u, u)) * (1.0 + model.inner(&p, v, v));
        prop_assert!(model.inner(&p, c, u).abs() < 1e-12 * scale);
        prop_assert!(model.inner(&p, c, v).abs() < 1e-12 * scale);
        let lagrange = model.inner(&p, c, c)
            - (model.inner(&p, u, u) * model.inner(&p, v, v) - model.inner(&p, u, v).powi(2));
        prop_assert!(lagrange.abs() < 1e-12 * scale * scale);
    }

    #[test]
    fn spectral_round_trips(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = SpectralField::random_divergence_free(2, &mut rng);
        // curl⁻¹∘curl = id and curl∘curl⁻¹ = id on admissible fields
        let a = x.curl_inv().unwrap();
        prop_assert!(a.curl().coeff_sup_distance(&x) < 1e-12);
        prop_assert!(x.curl().curl_inv().unwrap().coeff_sup_distance(&x) < 1e-12);
        // analysis of a synthesized grid is exact
        let m = 5;
        let samples: Vec<[f64; 3]> = grid_points(m).iter().map(|&p| x.value_at(p)).collect();
        let back = analyze_vector(&samples, m, 2).unwrap();
        prop_assert!(back.coeff_sup_distance(&x) < 1e-12);
        // serialization is bit-exact
        let text = serde_json::to_string(&x.to_doc()).unwrap();
        let parsed = SpectralField::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert!(parsed == x);
    }

    #[test]
    fn helicity_of_eigenfields_matches_norm_over_eigenvalue(k1 in -2i64..=2, k2 in -2i64..=2, k3 in -2i64..=2) {
        prop_assume!((k1, k2, k3) != (0, 0, 0));
        // canonical Beltrami eigenfield on the ±k pair: curl X = |2πk| X
        let k = [k1, k2, k3];
        let (e1, e2) = beltrami_core::operator::polarization_basis(k);
        let mut x = SpectralField::zeros(2);
        let coeff = |a: f64, b: f64| num_complex::Complex64::new(a / 2.0, b / 2.0);
        x.set_conjugate_pair(k, [coeff(e1[0], e2[0]), coeff(e1[1], e2[1]), coeff(e1[2], e2[2])]);
        let kv = [k1 as f64, k2 as f64, k3 as f64];
        let lambda = std::f64::consts::TAU * linalg::norm(kv);
        prop_assert!(x.curl().coeff_sup_distance(&x.scaled(lambda)) < 1e-12);
        let h = x.helicity().unwrap();
        let expected = x.l2_norm_sq() / lambda;
        prop_assert!((h - expected).abs() < 1e-10 * expected.abs().max(1.0));
    }
}
