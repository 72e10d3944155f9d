//! The 3-sphere in cylindric coordinates (r, φ, z), its frame and connection,
//! and the uniform magnetic field potential.
//!
//! Units c = ρ = 1. Spatial index order throughout is (r, φ, z); the
//! four-dimensional index order is (t, r, φ, z).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::report::CheckRow;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate r = {0} is on the chart boundary or outside (0, π)")]
    RadialBoundary(f64),
    #[error("coordinate z = {0} is on the chart boundary or outside (−π/2, π/2)")]
    AxialBoundary(f64),
}

pub const R: usize = 0;
pub const PHI: usize = 1;
pub const Z: usize = 2;

/// A point of the chart with its diagonal metric components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricPoint {
    pub r: f64,
    pub z: f64,
    pub phi: f64,
}

impl MetricPoint {
    /// Accepts only strictly interior points, where the chart is regular.
    pub fn new(r: f64, z: f64, phi: f64) -> Result<Self, GeometryError> {
        check_interior(r, z)?;
        Ok(Self { r, z, phi })
    }

    pub fn g_tt(&self) -> f64 {
        1.0
    }

    pub fn g_rr(&self) -> f64 {
        spatial_metric(self.r, self.z)[R]
    }

    pub fn g_phiphi(&self) -> f64 {
        spatial_metric(self.r, self.z)[PHI]
    }

    pub fn g_zz(&self) -> f64 {
        -1.0
    }
}

fn check_interior(r: f64, z: f64) -> Result<(), GeometryError> {
    if !(r > 0.0 && r < PI) {
        return Err(GeometryError::RadialBoundary(r));
    }
    if !(z > -FRAC_PI_2 && z < FRAC_PI_2) {
        return Err(GeometryError::AxialBoundary(z));
    }
    Ok(())
}

/// Diagonal of the spatial metric (g_rr, g_φφ, g_zz).
pub fn spatial_metric(r: f64, z: f64) -> [f64; 3] {
    let c2 = z.cos().powi(2);
    [-c2, -c2 * r.sin().powi(2), -1.0]
}

/// Closed-form partial derivatives `d[k][i] = ∂_k g_ii` of the spatial metric.
pub fn spatial_metric_derivatives(r: f64, z: f64) -> [[f64; 3]; 3] {
    let c2 = z.cos().powi(2);
    let s2r = r.sin().powi(2);
    let dz_c2 = -2.0 * z.sin() * z.cos();
    let dr_s2r = 2.0 * r.sin() * r.cos();
    [
        [0.0, -c2 * dr_s2r, 0.0],
        [0.0, 0.0, 0.0],
        [-dz_c2, -dz_c2 * s2r, 0.0],
    ]
}

/// Christoffel symbols `gamma[λ][μ][ν]` = Γ^λ_{μν} over the spatial indices.
pub type Christoffel = [[[f64; 3]; 3]; 3];

/// Ricci rotation coefficients that enter the separated equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RicciRotation {
    pub g122: f64,
    pub g311: f64,
    pub g322: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionData {
    pub christoffel: Christoffel,
    pub ricci_rotation: RicciRotation,
}

pub fn christoffel_closed_form(r: f64, z: f64) -> Result<ConnectionData, GeometryError> {
    check_interior(r, z)?;
    let tz = z.tan();
    let (sr, cr) = r.sin_cos();
    let (sz, cz) = z.sin_cos();
    let mut g = [[[0.0; 3]; 3]; 3];

    g[R][R][Z] = -tz;
    g[R][Z][R] = -tz;
    g[R][PHI][PHI] = -sr * cr;

    g[PHI][R][PHI] = cr / sr;
    g[PHI][PHI][R] = cr / sr;
    g[PHI][PHI][Z] = -tz;
    g[PHI][Z][PHI] = -tz;

    g[Z][R][R] = sz * cz;
    g[Z][PHI][PHI] = sz * cz * sr * sr;

    Ok(ConnectionData {
        christoffel: g,
        ricci_rotation: RicciRotation {
            g122: 1.0 / (cz * r.tan()),
            g311: -tz,
            g322: -tz,
        },
    })
}

fn full_spatial_metric(p: [f64; 3]) -> [f64; 3] {
    spatial_metric(p[R], p[Z])
}

/// Christoffel symbols from central differences of the metric with step `h`.
pub fn christoffel_finite_difference(r: f64, z: f64, h: f64) -> Result<Christoffel, GeometryError> {
    check_interior(r, z)?;
    let at = [r, 0.0, z];
    // dg[k][i] = ∂_k g_ii
    let mut dg = [[0.0; 3]; 3];
    for (k, row) in dg.iter_mut().enumerate() {
        let mut plus = at;
        let mut minus = at;
        plus[k] += h;
        minus[k] -= h;
        let gp = full_spatial_metric(plus);
        let gm = full_spatial_metric(minus);
        for i in 0..3 {
            row[i] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let g = full_spatial_metric(at);
    let mut out = [[[0.0; 3]; 3]; 3];
    for (l, out_l) in out.iter_mut().enumerate() {
        for mu in 0..3 {
            for nu in 0..3 {
                // Diagonal metric: only σ = λ survives in g^{λσ}.
                let d_mu = if l == nu { dg[mu][l] } else { 0.0 };
                let d_nu = if l == mu { dg[nu][l] } else { 0.0 };
                let d_l = if mu == nu { dg[l][mu] } else { 0.0 };
                out_l[mu][nu] = 0.5 / g[l] * (d_mu + d_nu - d_l);
            }
        }
    }
    Ok(out)
}

/// Max |∇_λ g_μν| using closed-form metric derivatives and connection.
pub fn metric_compatibility_residual(r: f64, z: f64) -> Result<f64, GeometryError> {
    let conn = christoffel_closed_form(r, z)?;
    let g = spatial_metric(r, z);
    let dg = spatial_metric_derivatives(r, z);
    let gam = &conn.christoffel;
    let metric = |a: usize, b: usize| if a == b { g[a] } else { 0.0 };
    let mut worst: f64 = 0.0;
    for l in 0..3 {
        for mu in 0..3 {
            for nu in 0..3 {
                let partial = if mu == nu { dg[l][mu] } else { 0.0 };
                let mut cov = partial;
                for s in 0..3 {
                    cov -= gam[s][l][mu] * metric(s, nu) + gam[s][l][nu] * metric(mu, s);
                }
                worst = worst.max(cov.abs());
            }
        }
    }
    Ok(worst)
}

/// Tetrad `e[a][β]` = e_(a)^β in the order (t, r, φ, z).
pub fn tetrad(r: f64, z: f64) -> Result<[[f64; 4]; 4], GeometryError> {
    check_interior(r, z)?;
    let cz = z.cos();
    let mut e = [[0.0; 4]; 4];
    e[0][0] = 1.0;
    e[1][1] = 1.0 / cz;
    e[2][2] = 1.0 / (cz * r.sin());
    e[3][3] = 1.0;
    Ok(e)
}

/// Max |e_(a)^μ e_(b)^ν g_μν − η_ab|.
pub fn tetrad_orthonormality_residual(r: f64, z: f64) -> Result<f64, GeometryError> {
    let e = tetrad(r, z)?;
    let gs = spatial_metric(r, z);
    let g = [1.0, gs[R], gs[PHI], gs[Z]];
    let eta = [1.0, -1.0, -1.0, -1.0];
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                s += e[a][mu] * e[b][mu] * g[mu];
            }
            let target = if a == b { eta[a] } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    Ok(worst)
}

/// Lowered spatial tetrad e_(a)β = g_βμ e_(a)^μ for a, β spatial.
fn lowered_tetrad(p: [f64; 3]) -> [[f64; 3]; 3] {
    let g = full_spatial_metric(p);
    let cz = p[Z].cos();
    let up = [1.0 / cz, 1.0 / (cz * p[R].sin()), 1.0];
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        out[a][a] = g[a] * up[a];
    }
    out
}

/// γ_abc = −e_(a)β;α e_(b)^β e_(c)^α from the tetrad and a connection, with
/// the frame derivative taken by central differences of step `h`.
pub fn ricci_rotation_from_tetrad(
    r: f64,
    z: f64,
    christoffel: &Christoffel,
    h: f64,
) -> Result<[[[f64; 3]; 3]; 3], GeometryError> {
    check_interior(r, z)?;
    let at = [r, 0.0, z];
    let low = lowered_tetrad(at);
    // d_low[k][a][β] = ∂_k e_(a)β
    let mut d_low = [[[0.0; 3]; 3]; 3];
    for (k, dk) in d_low.iter_mut().enumerate() {
        let mut plus = at;
        let mut minus = at;
        plus[k] += h;
        minus[k] -= h;
        let lp = lowered_tetrad(plus);
        let lm = lowered_tetrad(minus);
        for a in 0..3 {
            for b in 0..3 {
                dk[a][b] = (lp[a][b] - lm[a][b]) / (2.0 * h);
            }
        }
    }
    let e4 = tetrad(r, z)?;
    let up = |a: usize, mu: usize| e4[a + 1][mu + 1];
    let mut out = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut s = 0.0;
                for beta in 0..3 {
                    for alpha in 0..3 {
                        let w = up(b, beta) * up(c, alpha);
                        if w == 0.0 {
                            continue;
                        }
                        let mut cov = d_low[alpha][a][beta];
                        for sig in 0..3 {
                            cov -= christoffel[sig][alpha][beta] * low[a][sig];
                        }
                        s += cov * w;
                    }
                }
                out[a][b][c] = -s;
            }
        }
    }
    Ok(out)
}

/// Magnetic parameter and azimuthal quantum number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldConfig {
    pub b: f64,
    pub m: i64,
}

impl FieldConfig {
    pub fn new(b: f64, m: i64) -> Self {
        Self { b, m }
    }

    /// ν(r) = m + B(1 − cos r).
    pub fn nu(&self, r: f64) -> f64 {
        self.m as f64 + self.b * (1.0 - r.cos())
    }

    /// A_φ = B(cos r − 1) = −2B sin²(r/2).
    pub fn potential(&self, r: f64) -> f64 {
        -2.0 * self.b * (0.5 * r).sin().powi(2)
    }
}

/// F_φr = B sin r.
pub fn field_strength(cfg: &FieldConfig, r: f64) -> f64 {
    cfg.b * r.sin()
}

/// Tolerances for the geometry suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryTolerances {
    pub christoffel_fd: f64,
    pub christoffel_symmetry: f64,
    pub metric_compatibility: f64,
    pub tetrad_orthonormality: f64,
    pub ricci_rotation: f64,
    pub field_strength: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        Self {
            christoffel_fd: 1e-6,
            christoffel_symmetry: 0.0,
            metric_compatibility: 1e-10,
            tetrad_orthonormality: 1e-12,
            ricci_rotation: 1e-6,
            field_strength: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryCheckConfig {
    pub samples: usize,
    pub seed: u64,
    /// Finite-difference step.
    pub step: f64,
    pub tolerances: GeometryTolerances,
}

impl Default for GeometryCheckConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            step: 1e-4,
            tolerances: GeometryTolerances::default(),
        }
    }
}

/// Sampling box for random interior points, kept away from the chart edges
/// where the inverse metric blows up.
pub const SAMPLE_R: (f64, f64) = (0.2, PI - 0.2);
pub const SAMPLE_Z: (f64, f64) = (-1.0, 1.0);

pub fn sample_points(samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            (
                rng.gen_range(SAMPLE_R.0..SAMPLE_R.1),
                rng.gen_range(SAMPLE_Z.0..SAMPLE_Z.1),
            )
        })
        .collect()
}

/// Runs the full geometry verification at `samples` seeded random points.
pub fn geometry_checks(cfg: &GeometryCheckConfig) -> Result<Vec<CheckRow>, GeometryError> {
    let tol = &cfg.tolerances;
    let pts = sample_points(cfg.samples, cfg.seed);
    let mut fd: f64 = 0.0;
    let mut sym: f64 = 0.0;
    let mut compat: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    let mut ricci: f64 = 0.0;
    for &(r, z) in &pts {
        let conn = christoffel_closed_form(r, z)?;
        let num = christoffel_finite_difference(r, z, cfg.step)?;
        for l in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    fd = fd.max((conn.christoffel[l][mu][nu] - num[l][mu][nu]).abs());
                    sym = sym.max(
                        (conn.christoffel[l][mu][nu] - conn.christoffel[l][nu][mu]).abs(),
                    );
                }
            }
        }
        compat = compat.max(metric_compatibility_residual(r, z)?);
        ortho = ortho.max(tetrad_orthonormality_residual(r, z)?);
        let gam = ricci_rotation_from_tetrad(r, z, &conn.christoffel, cfg.step)?;
        let rr = conn.ricci_rotation;
        ricci = ricci
            .max((gam[0][1][1] - rr.g122).abs())
            .max((gam[2][0][0] - rr.g311).abs())
            .max((gam[2][1][1] - rr.g322).abs())
            // antisymmetry in the first pair
            .max((gam[1][0][1] + rr.g122).abs());
    }

    let mut field: f64 = 0.0;
    let h = cfg.step;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    for _ in 0..cfg.samples {
        let b = rng.gen_range(-3.0..3.0);
        let r = rng.gen_range(0.0..PI);
        let f = FieldConfig::new(b, 0);
        let deriv = (f.potential(r + h) - f.potential(r - h)) / (2.0 * h);
        field = field.max((field_strength(&f, r) + deriv).abs());
    }
    let gauge = FieldConfig::new(1.0, 0).potential(0.0).abs();

    Ok(vec![
        CheckRow::new("christoffel_vs_finite_difference", fd, tol.christoffel_fd),
        CheckRow::new("christoffel_lower_symmetry", sym, tol.christoffel_symmetry),
        CheckRow::new("metric_compatibility", compat, tol.metric_compatibility),
        CheckRow::new("tetrad_orthonormality", ortho, tol.tetrad_orthonormality),
        CheckRow::new("ricci_rotation_from_tetrad", ricci, tol.ricci_rotation),
        CheckRow::new("field_strength_vs_potential_derivative", field, tol.field_strength),
        CheckRow::new("potential_vanishes_on_axis", gauge, 0.0),
    ])
}
