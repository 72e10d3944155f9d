use nalgebra::Matrix3;
use proptest::prelude::*;

use dkp_sphere::zsystem::{
    amplitude_ratios, decoupled_spectrum, endpoint_residual, exponent_pair, family_vector, indicial_cubic,
    solve_z_spectrum, z_grid, CubicBranch, Endpoint, ZSolveConfig,
};

fn companion(l: f64, b: f64) -> Vec<(f64, f64)> {
    let b2 = 0.25 * b * b;
    let (a, c1, c0) = (-(3.0 * l + 1.0), 3.0 * l * l - b2, -(l * l - b2) * (l - 1.0));
    let m = Matrix3::new(-a, -c1, -c0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let mut v: Vec<(f64, f64)> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    v
}

#[test]
fn unit_lambda_roots() {
    let s = indicial_cubic(1.0, 0.0).unwrap();
    assert_eq!(s.branch, CubicBranch::Trigonometric);
    for (got, want) in s.roots.iter().zip([0.0, 1.0, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn decoupled_levels() {
    assert_eq!(decoupled_spectrum(9), vec![1.0, 1.0, 3.0, 4.0, 4.0, 8.0, 9.0, 9.0, 15.0]);
    let sols = solve_z_spectrum(0.0, 0.0, &ZSolveConfig { grid: 200, nev: 5, ..ZSolveConfig::default() }).unwrap();
    for (s, want) in sols.iter().zip(decoupled_spectrum(5)) {
        assert!((s.eps2m - want).abs() / want < 1e-3);
        assert!(s.converged);
    }
}

#[test]
fn grid_is_symmetric() {
    let (z, h) = z_grid(101);
    for j in 0..z.len() {
        assert_eq!(z[j], -z[z.len() - 1 - j]);
    }
    assert!((z[0] + std::f64::consts::FRAC_PI_2 - h).abs() < 1e-15);
}

#[test]
fn exponent_pair_solves_quadratic() {
    for a in [0.0, 0.5, 3.0, 17.25] {
        let p = exponent_pair(a).unwrap();
        for e in [p.regular, p.singular] {
            assert!((2.0 * e * e - e - a).abs() < 1e-12);
        }
    }
    assert!(exponent_pair(-1.0).is_err());
}

#[test]
fn seeded_solve_is_reproducible() {
    let cfg = ZSolveConfig { grid: 100, nev: 3, seed: 5, ..ZSolveConfig::default() };
    let a = solve_z_spectrum(1.0, 1.0, &cfg).unwrap();
    let b = solve_z_spectrum(1.0, 1.0, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(solve_z_spectrum(-1.0, 0.0, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]
    #[test]
    fn roots_match_companion_matrix(l in 0.0f64..20.0, b in -3.0f64..3.0) {
        let s = indicial_cubic(l, b).unwrap();
        let mut mine: Vec<(f64, f64)> = (0..3).map(|k| (s.roots[k], s.roots_im[k])).collect();
        mine.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        for (x, y) in mine.iter().zip(companion(l, b)) {
            let scale = y.0.hypot(y.1).max(1.0);
            prop_assert!((x.0 - y.0).hypot(x.1 - y.1) / scale < 1e-9);
        }
        for k in 0..3 {
            prop_assert!(s.scaled_residual(k) < 1e-12);
        }
    }

    #[test]
    fn family_vectors_solve_endpoint_system(l in 0.0f64..10.0, b in -2.0f64..2.0) {
        let s = indicial_cubic(l, b).unwrap();
        for k in 0..3 {
            if s.roots_im[k] != 0.0 {
                continue;
            }
            for end in [Endpoint::Left, Endpoint::Right] {
                let v = family_vector(s.lambda, s.lambda_prime, s.roots[k], end);
                prop_assert!(endpoint_residual(s.lambda, s.lambda_prime, s.roots[k], end, v) < 1e-9);
            }
            let r = amplitude_ratios(&s, k).unwrap();
            if !r.degenerate {
                prop_assert!((r.a1_over_a2 + r.b1_over_b2).abs() < 1e-9 * (1.0 + r.a1_over_a2.abs()));
                prop_assert!((r.a3_over_a2 + r.b3_over_b2).abs() < 1e-9 * (1.0 + r.a3_over_a2.abs()));
            }
        }
    }
}
