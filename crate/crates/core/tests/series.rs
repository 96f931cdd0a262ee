mod common;

use common::random_problem;
use gibbs_mbpt::amplitudes::{bold_series_check, green_series, omega_series, sigma_series, z_series, PowerSeries};
use gibbs_mbpt::enumeration::pairings;
use gibbs_mbpt::model::{gaussian_reference, sec5_problem, GibbsProblem};
use gibbs_mbpt::oracle::{exact_quantities, QuadratureSpec};
use nalgebra::DMatrix;

/// `<prod x_{idx}>_0` by brute-force Wick pairing.
fn wick(g0: &DMatrix<f64>, idx: &[usize]) -> f64 {
    let pos: Vec<usize> = (0..idx.len()).collect();
    pairings(&pos).unwrap().map(|ps| ps.iter().map(|&(a, b)| g0[(idx[a], idx[b])]).product::<f64>()).sum()
}

/// `(-1)^k / (k! 8^k) sum v...v <x_i^2 x_j^2 ...>_0`, straight from the Taylor
/// expansion of the interaction weight.
fn z_coefficient_by_wick(p: &GibbsProblem, k: usize) -> f64 {
    let n = p.dim();
    let g0 = gaussian_reference(p).g0;
    let v = p.v_unit();
    let mut total = 0.0;
    let count = n.pow(2 * k as u32);
    for code in 0..count {
        let mut c = code;
        let mut idx = Vec::with_capacity(4 * k);
        let mut weight = 1.0;
        for _ in 0..k {
            let i = c % n;
            c /= n;
            let j = c % n;
            c /= n;
            weight *= v[(i, j)];
            idx.extend([i, i, j, j]);
        }
        if weight != 0.0 {
            total += weight * wick(&g0, &idx);
        }
    }
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    (-1f64).powi(k as i32) * total / (fact * 8f64.powi(k as i32))
}

#[test]
fn z_coefficients_match_direct_wick_expansion() {
    let p = random_problem(3, 11, 1.0);
    let z = z_series(&p, 3).unwrap();
    assert_eq!(*z.coeff(0), 1.0);
    for k in 1..=3 {
        let want = z_coefficient_by_wick(&p, k);
        assert!((z.coeff(k) - want).abs() < 1e-11 * want.abs().max(1.0), "order {k}: {} vs {want}", z.coeff(k));
    }
}

#[test]
fn first_order_green_by_wick() {
    let p = random_problem(3, 5, 1.0);
    let g0 = gaussian_reference(&p).g0;
    let v = p.v_unit();
    let g = green_series(&p, 1).unwrap();
    let n = 3;
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let full = wick(&g0, &[a, b, i, i, j, j]);
                    let disc = g0[(a, b)] * wick(&g0, &[i, i, j, j]);
                    s += v[(i, j)] * (full - disc);
                }
            }
            assert!((g.coeff(1)[(a, b)] + s / 8.0).abs() < 1e-13);
        }
    }
    assert!((g.coeff(0) - g0).amax() < 1e-15);
}

#[test]
fn section_five_coefficients() {
    let p = sec5_problem();
    let z = z_series(&p, 3).unwrap();
    let w = omega_series(&p, 3).unwrap();
    for (got, want) in z.coeffs().iter().zip([1.0, -1.56, 7.401, -65.189]) {
        assert!((got - want).abs() < 1e-3);
    }
    assert!((w.coeff(1) - 1.56).abs() < 1e-12);
}

#[test]
fn linked_cluster() {
    for p in [sec5_problem(), random_problem(3, 2, 1.0)] {
        let z = z_series(&p, 3).unwrap();
        let w = omega_series(&p, 3).unwrap();
        let log_z = z.ln().unwrap();
        for k in 0..=3 {
            assert!((log_z.coeff(k) + w.coeff(k)).abs() < 1e-10 * w.coeff(k).abs().max(1.0));
        }
    }
}

#[test]
fn dyson_identity_formally() {
    for p in [sec5_problem(), random_problem(3, 9, 1.0)] {
        let sigma = sigma_series(&p, 3).unwrap();
        let g = green_series(&p, 3).unwrap();
        let mut m: Vec<DMatrix<f64>> = sigma.coeffs().iter().map(|c| -c).collect();
        m[0] = p.a().clone();
        let inv = PowerSeries::new(m).inverse().unwrap();
        for d in g.deviation(&inv) {
            assert!(d < 1e-10);
        }
    }
}

#[test]
fn bold_expansion_reproduces_bare_sigma() {
    for p in [sec5_problem(), random_problem(3, 1, 1.0), random_problem(3, 2, 1.0), random_problem(3, 3, 1.0)] {
        let r = bold_series_check(&p, 3).unwrap();
        assert!(r.deviation.iter().all(|&d| d < 1e-10), "{:?}", r.deviation);
    }
}

#[test]
fn partition_function_series_against_quadrature() {
    let p = sec5_problem();
    let z = z_series(&p, 3).unwrap();
    let spec = QuadratureSpec { nodes_per_dim: 40, ..QuadratureSpec::default() };
    for lambda in [1e-3, 1e-2] {
        let exact = exact_quantities(&p.with_lambda(lambda).unwrap(), &spec).unwrap();
        let err = (z.evaluate(lambda) - exact.z_over_z0).abs();
        assert!(err < 2e3 * lambda.powi(4), "lambda {lambda}: {err}");
    }
}

#[test]
fn green_series_against_quadrature() {
    let p = sec5_problem();
    let g = green_series(&p, 2).unwrap();
    let spec = QuadratureSpec { nodes_per_dim: 40, ..QuadratureSpec::default() };
    let lambda = 1e-3;
    let exact = exact_quantities(&p.with_lambda(lambda).unwrap(), &spec).unwrap();
    assert!((g.evaluate(lambda) - exact.g).amax() < 1e-6);
}
