use std::f64::consts::PI;

use proptest::prelude::*;

use dkp_sphere::geometry::{
    christoffel_closed_form, christoffel_finite_difference, field_strength, geometry_checks, tetrad,
    FieldConfig, GeometryCheckConfig,
};

/// ∂_r A_φ for A_φ = B(cos r − 1), by central difference.
fn field_fd(b: f64, r: f64, h: f64) -> f64 {
    let a = |x: f64| b * (x.cos() - 1.0);
    (a(r + h) - a(r - h)) / (2.0 * h)
}

#[test]
fn default_suite_passes() {
    let rows = geometry_checks(&GeometryCheckConfig::default()).unwrap();
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn boundary_points_are_rejected() {
    assert!(christoffel_closed_form(0.0, 0.0).is_err());
    assert!(christoffel_closed_form(1.0, PI / 2.0).is_err());
    assert!(tetrad(PI, 0.0).is_err());
}

#[test]
fn tight_tolerance_fails() {
    let mut cfg = GeometryCheckConfig { samples: 10, ..GeometryCheckConfig::default() };
    cfg.tolerances.christoffel_fd = 1e-30;
    let rows = geometry_checks(&cfg).unwrap();
    assert!(rows.iter().any(|r| !r.pass));
}

proptest! {
    #[test]
    fn closed_form_matches_differences(r in 0.2f64..(PI - 0.2), z in -1.2f64..1.2) {
        let exact = christoffel_closed_form(r, z).unwrap().christoffel;
        let fd = christoffel_finite_difference(r, z, 1e-4).unwrap();
        for l in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    prop_assert!((exact[l][m][n] - fd[l][m][n]).abs() < 1e-6);
                    prop_assert_eq!(exact[l][m][n], exact[l][n][m]);
                }
            }
        }
    }

    #[test]
    fn field_strength_is_curl_of_potential(b in -3.0f64..3.0, r in 0.1f64..(PI - 0.1)) {
        let f = field_strength(&FieldConfig::new(b, 0), r);
        prop_assert!((f + field_fd(b, r, 1e-5)).abs() < 1e-8);
    }
}
