use super::*;
use crate::chart_metric::fixtures::*;
use crate::chart_metric::{random_samples, sample_lattice, DirectionSet};
use crate::linalg::{max_abs_mat, max_abs_vec};

fn fd() -> FdConfig {
    FdConfig::default()
}

#[test]
fn flat_fixtures_have_no_curvature() {
    let e = euclidean(3);
    let s = e.sample(0, vec![0.1, 0.2, 0.3], vec![1.0, -0.5, 0.25]);
    let rc = riemann_curvature(&e, &s).unwrap();
    assert!(rc.spray.iter().all(|v| *v == 0.0));
    assert_eq!(rc.ric, 0.0);
    let b = compute_curvature(&e, &s, &fd()).unwrap();
    assert_eq!(max_abs_mat(&b.ric_ij), 0.0);
    assert_eq!(b.rho, 0.0);
    assert_eq!(max_abs_vec(&b.rho_i), 0.0);

    let r = minkowski_randers(3);
    let s = r.sample(0, vec![0.1, 0.2, 0.3], vec![1.0, -0.5, 0.25]);
    let rc = riemann_curvature(&r, &s).unwrap();
    assert!(rc.spray.iter().all(|v| v.abs() <= 1e-14));
    assert!(rc.ric.abs() <= 1e-13);
}

#[test]
fn sphere_spray_matches_christoffel_oracle() {
    let spec = sphere(3, 1.0);
    for s in random_samples(&spec, 10, 4) {
        let g = spray_coefficients(&spec, &s).unwrap();
        let oracle = christoffel_oracle(&spec.alpha, &s.x, &fd()).unwrap().spray(&s.y);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in g.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-7 * scale, "{a} vs {b}");
        }
    }
}

#[test]
fn sphere_has_constant_curvature() {
    for n in [2usize, 3, 4] {
        let spec = sphere(n, 1.0);
        for s in random_samples(&spec, 8, 1) {
            let (ric, r) = ricci_scalars(&spec, &s.x, &s.y).unwrap();
            assert!((r - (n as f64 - 1.0)).abs() <= 1e-5, "n={n}: R = {r}");
            let classical = christoffel_oracle(&spec.alpha, &s.x, &fd()).unwrap().ricci_scalar(&s.y);
            assert!((ric - classical).abs() <= 1e-5 * classical.abs());
        }
    }
    let spec = sphere(3, 2.0);
    let s = spec.sample(0, vec![0.5, 0.1, -0.3], vec![0.2, 1.0, 0.4]);
    let (_, r) = ricci_scalars(&spec, &s.x, &s.y).unwrap();
    assert!((r - 0.5).abs() <= 1e-9);
}

#[test]
fn sphere_ricci_tensor_and_trace() {
    let spec = sphere(3, 1.0);
    let s = spec.sample(0, vec![0.3, -0.2, 0.4], vec![0.6, 0.8, -0.3]);
    let b = compute_curvature(&spec, &s, &fd()).unwrap();
    let a = spec.alpha_matrix(&s.x);
    assert!(max_abs_mat(&(&b.ric_ij - &a * 2.0)) <= 1e-4 * max_abs_mat(&a));
    assert!((b.rho - 6.0).abs() <= 1e-4);
    assert!(max_abs_vec(&b.rho_i) <= 1e-4);
    assert!((b.rnorm - 2.0).abs() <= 1e-9);
    assert!(max_abs_vec(&b.r_der1) <= 1e-6);
}

#[test]
fn homogeneity_ladder() {
    let spec = randers_var(3);
    let s = spec.sample(0, vec![0.3, -0.4, 0.5], vec![0.7, 0.2, -0.6]);
    let base = riemann_curvature(&spec, &s).unwrap();
    let (_, r0) = ricci_scalars(&spec, &s.x, &s.y).unwrap();
    for lam in [0.5, 2.0] {
        let y: Vec<f64> = s.y.iter().map(|v| v * lam).collect();
        let sl = spec.sample(1, s.x.clone(), y.clone());
        let rc = riemann_curvature(&spec, &sl).unwrap();
        let l2 = lam * lam;
        for (a, b) in rc.spray.iter().zip(&base.spray) {
            assert!((a - l2 * b).abs() <= 1e-8 * b.abs().max(1e-300) + 1e-15);
        }
        assert!(max_abs_mat(&(&rc.rmk - &base.rmk * l2)) <= 1e-8 * max_abs_mat(&base.rmk) * l2);
        assert!((rc.ric - l2 * base.ric).abs() <= 1e-8 * l2 * base.ric.abs());
        let (_, r) = ricci_scalars(&spec, &s.x, &y).unwrap();
        assert!((r - r0).abs() <= 1e-8 * r0.abs());
    }
}

#[test]
fn ricci_tensor_euler_and_rho_consistency() {
    let spec = randers_var(3);
    for s in random_samples(&spec, 3, 9) {
        let b = compute_curvature(&spec, &s, &fd()).unwrap();
        let y = Vector::from_column_slice(&s.y);
        let lhs = y.dot(&(&b.ric_ij * &y));
        let f2 = b.tensors.f * b.tensors.f;
        assert!((lhs - f2 * b.rnorm).abs() <= 1e-6 * (f2 * b.rnorm).abs());
        assert!(b.ric_ij.transpose() == b.ric_ij);
        assert!(b.r_der3.asymmetry() == 0.0);
        // ρ is 0-homogeneous
        let yr = b.rho_i.dot(&y);
        assert!(yr.abs() <= 1e-5 * max_abs_vec(&b.rho_i) * y.norm(), "{yr}");
        let pr = b.rho_i_product_rule();
        assert!(max_abs_vec(&(&pr - &b.rho_i)) <= 1e-5 * max_abs_vec(&pr), "{pr} {}", b.rho_i);
    }
}

#[test]
fn einstein_diagnostic_fixtures() {
    let lattice = |spec: &FinslerMetricSpec| sample_lattice(spec, 6, DirectionSet::LowDiscrepancy { seed: 0 }).unwrap();
    let sp = sphere(3, 1.0);
    let d = einstein_diagnostic(&sp, &lattice(&sp), TOL_EINSTEIN).unwrap();
    assert!(d.einstein && d.max_rel_deviation <= 1e-5);
    assert!(d.mean_r_per_x().iter().all(|r| (r - 2.0).abs() <= 1e-6));
    let e = euclidean(3);
    let d = einstein_diagnostic(&e, &lattice(&e), TOL_EINSTEIN).unwrap();
    assert!(d.einstein && d.max_rel_deviation == 0.0);
    let rv = randers_var(3);
    let d = einstein_diagnostic(&rv, &lattice(&rv), TOL_EINSTEIN).unwrap();
    assert!(!d.einstein && d.max_rel_deviation >= 1e-2, "{}", d.max_rel_deviation);
    assert!(d.to_csv().lines().count() == d.per_point.len() + 1);
}

#[test]
fn nested_ricci_gradient_matches_third_derivative() {
    let spec = randers_var(3);
    let s = spec.sample(0, vec![0.2, -0.1, 0.4], vec![0.5, 0.9, -0.3]);
    let b = compute_curvature(&spec, &s, &fd()).unwrap();
    let d = b.ric_ij_grad.sub(&b.ric_ijk).max_abs();
    assert!(d <= 1e-5 * b.ric_ijk.max_abs(), "{d}");
    let y = Vector::from_column_slice(&s.y);
    // Euler: y^i ∂_i Ric = 2 Ric
    assert!((b.ric_grad.dot(&y) - 2.0 * b.ric).abs() <= 1e-8 * b.ric.abs());
}
