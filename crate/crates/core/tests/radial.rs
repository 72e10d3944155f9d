use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use dkp_sphere::radial::{
    ode_residual, quantize, quantize_exact, radial_wavefunction, standard_lattice, verify_eigenrelation,
    RadialError, RadialGrid,
};

/// Associated Legendre P_l^m(x) for m ≥ 0 by upward recurrence in l.
fn legendre(l: u32, m: u32, x: f64) -> f64 {
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for k in 0..m {
        pmm *= -((2 * k + 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn zero_field_gives_spherical_harmonics() {
    let grid = RadialGrid::open_interval(400);
    for m in -3i64..=3 {
        for n in 0..4i64 {
            let sol = quantize(m, 0.0, n).unwrap();
            let l = (m.unsigned_abs() + n as u64) as u32;
            assert!((2.0 * sol.lambda - f64::from(l * (l + 1))).abs() < 1e-12);
            let r = radial_wavefunction(&sol, &grid.points).unwrap();
            let p: Vec<f64> = grid.points.iter().map(|&x| legendre(l, m.unsigned_abs() as u32, x.cos())).collect();
            let pmax = p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let sign = if p.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            for (a, b) in p.iter().zip(&r) {
                assert!((a / pmax - sign * b).abs() < 1e-10, "m={m} n={n}");
            }
        }
    }
}

#[test]
fn exact_lattice_identity() {
    for (m, b, n) in standard_lattice() {
        let lvl = quantize_exact(m, &b, n);
        assert!(lvl.spectrum_residual().is_zero());
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(lvl.big_lambda, &lvl.lambda + &b * &half);
        assert_eq!(lvl.lambda_prime, &lvl.lambda + &b);
        assert!(lvl.check_hypergeometric());
    }
}

#[test]
fn ladder_shift_equals_field() {
    let grid = RadialGrid::open_interval(3000);
    for (m, b, n) in [(1, 1.0, 0), (2, -0.5, 1), (-1, 2.0, 2), (0, 0.5, 1)] {
        let sol = quantize(m, b, n).unwrap();
        let rep = verify_eigenrelation(&sol, &grid).unwrap();
        assert!(rep.lower_residual < 1e-6 && rep.upper_residual < 1e-6, "{rep:?}");
        assert!((rep.measured_shift - b).abs() < 1e-6, "{rep:?}");
    }
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(matches!(quantize(1, 0.0, -1), Err(RadialError::NegativeN(_))));
    assert!(quantize(1, f64::NAN, 0).is_err());
    let sol = quantize(3000, 0.0, 0).unwrap();
    let grid = RadialGrid::open_interval(100);
    let pts: Vec<f64> = grid.points.iter().map(|r| r * 1e-3).collect();
    assert!(matches!(radial_wavefunction(&sol, &pts), Err(RadialError::PrefactorUnderflow { .. })));
    assert!(ode_residual(&sol, &RadialGrid::open_interval(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn bound_states_satisfy_quantization(m in -4i64..=4, b in -3.0f64..3.0, n in 0i64..4) {
        let sol = quantize(m, b, n).unwrap();
        prop_assert!((2.0 * sol.big_lambda + b * b - sol.big_n * (sol.big_n + 1.0)).abs() < 1e-10);
        for r in [0.3, 1.0, 2.0, PI - 0.3] {
            prop_assert!(sol.analytic_ode_residual(r) < 1e-10);
        }
    }

    // half-integer B keeps R a polynomial in sin and cos of r/2, which the
    // finite-difference residual resolves up to the ends
    #[test]
    fn bound_states_solve_the_ode(m in -4i64..=4, twice_b in -6i64..=6, n in 0i64..4) {
        let sol = quantize(m, 0.5 * twice_b as f64, n).unwrap();
        let grid = RadialGrid::open_interval(2000);
        prop_assert!(ode_residual(&sol, &grid).unwrap() < 1e-8);
    }
}
