//! Radial ladder operators, hypergeometric bound states and the quantization
//! rule.
//!
//! With ν(r) = m + B(1 − cos r) and γ = 1/√2 the first-order operators are
//!
//! ```text
//! â_s = γ( d/dr + (ν + s·cos r)/sin r)
//! b̂_s = γ(−d/dr + (ν + s·cos r)/sin r),   s ∈ {−1, 0, +1}
//! ```
//!
//! Their compositions differ by a constant: `â₊b̂ = b̂₋â + B`. A radial
//! function with `b̂₋â R = λR` therefore has `â₊b̂ R = λ′R` with
//! `λ′ = λ + B`, and the symmetric parametrization
//! `λ = Λ − B/2`, `λ′ = Λ + B/2` follows.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::FieldConfig;
use crate::linalg::{tridiagonal_eigenvalue, LinalgError};

/// Coefficient γ of the ladder operators.
pub const GAMMA: f64 = FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("radial quantum number must be non-negative, got {0}")]
    NegativeN(i64),
    #[error("azimuthal quantum number must be an integer, got {0}")]
    NonIntegerM(f64),
    #[error("magnetic parameter must be finite, got {0}")]
    NonFiniteField(f64),
    #[error("quantization requires 2λ + (B + 1/2)² > 0, got {0}")]
    NonPositiveRoot(f64),
    #[error(
        "wavefunction prefactor underflows on the whole grid (max log-magnitude {max_log:.1}); \
         reduce |m| or |B|"
    )]
    PrefactorUnderflow { max_log: f64 },
    #[error("grid needs at least {needed} uniformly spaced points, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Direction of the derivative term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slope {
    /// `+d/dr` (the â family)
    Forward,
    /// `−d/dr` (the b̂ family)
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LadderOperator {
    pub slope: Slope,
    /// Multiplier of `cos r` in the potential term, one of −1, 0, +1.
    pub shift: i8,
}

impl LadderOperator {
    pub fn coefficient(&self, cfg: &FieldConfig, r: f64) -> f64 {
        (cfg.nu(r) + f64::from(self.shift) * r.cos()) / r.sin()
    }

    /// Pointwise value given `f(r)` and `f'(r)`.
    pub fn eval(&self, cfg: &FieldConfig, r: f64, f: f64, df: f64) -> f64 {
        let sign = match self.slope {
            Slope::Forward => 1.0,
            Slope::Backward => -1.0,
        };
        GAMMA * (sign * df + self.coefficient(cfg, r) * f)
    }

    /// Applies the operator to samples on a uniform grid, using fourth-order
    /// central differences (one-sided at the two ends).
    pub fn apply(&self, cfg: &FieldConfig, grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
        let df = first_derivative_o4(f, grid.step);
        grid.points
            .iter()
            .zip(f.iter().zip(&df))
            .map(|(&r, (&fv, &dv))| self.eval(cfg, r, fv, dv))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderOperators {
    pub cfg: FieldConfig,
    pub a_minus: LadderOperator,
    pub a_plus: LadderOperator,
    pub a: LadderOperator,
    pub b_minus: LadderOperator,
    pub b_plus: LadderOperator,
    pub b: LadderOperator,
}

pub fn make_operators(cfg: FieldConfig) -> LadderOperators {
    let op = |slope, shift| LadderOperator { slope, shift };
    LadderOperators {
        cfg,
        a_minus: op(Slope::Forward, -1),
        a_plus: op(Slope::Forward, 1),
        a: op(Slope::Forward, 0),
        b_minus: op(Slope::Backward, -1),
        b_plus: op(Slope::Backward, 1),
        b: op(Slope::Backward, 0),
    }
}

impl LadderOperators {
    /// b̂₋â applied as two successive first-order operators.
    pub fn b_minus_a(&self, grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
        let af = self.a.apply(&self.cfg, grid, f);
        self.b_minus.apply(&self.cfg, grid, &af)
    }

    /// â₊b̂ applied as two successive first-order operators.
    pub fn a_plus_b(&self, grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
        let bf = self.b.apply(&self.cfg, grid, f);
        self.a_plus.apply(&self.cfg, grid, &bf)
    }
}

/// ½(−f″ − cot r·f′ − B f + ν²f/sin²r), the reduced form of b̂₋â.
pub fn b_minus_a_second_order(cfg: &FieldConfig, r: f64, f: f64, df: f64, d2f: f64) -> f64 {
    let s = r.sin();
    let nu = cfg.nu(r);
    0.5 * (-d2f - r.cos() / s * df - cfg.b * f + nu * nu / (s * s) * f)
}

/// ½(−f″ − cot r·f′ + B f + ν²f/sin²r), the reduced form of â₊b̂.
pub fn a_plus_b_second_order(cfg: &FieldConfig, r: f64, f: f64, df: f64, d2f: f64) -> f64 {
    b_minus_a_second_order(cfg, r, f, df, d2f) + cfg.b * f
}

/// Uniform grid on the open interval (0, π).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    pub points: Vec<f64>,
    pub step: f64,
}

impl RadialGrid {
    /// `count` interior points r_j = jπ/(count+1).
    pub fn open_interval(count: usize) -> Self {
        let step = PI / (count as f64 + 1.0);
        Self {
            points: (1..=count).map(|j| j as f64 * step).collect(),
            step,
        }
    }

    /// Interior grid whose spacing is as close as possible to `h`.
    pub fn with_step(h: f64) -> Self {
        let count = ((PI / h).round() as usize).saturating_sub(1).max(1);
        Self::open_interval(count)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn first_derivative_o2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    for j in 1..n - 1 {
        d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Fourth-order first derivative: five-point central stencil in the bulk,
/// five-point one-sided stencils at the two points nearest each end.
pub fn first_derivative_o4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        return first_derivative_o2(f, h);
    }
    for j in 2..n - 2 {
        d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
    }
    let fwd = |s: &[f64]| (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
    let fwd1 = |s: &[f64]| (-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]) / (12.0 * h);
    d[0] = fwd(&f[0..5]);
    d[1] = fwd1(&f[0..5]);
    let rev: Vec<f64> = f[n - 5..].iter().rev().copied().collect();
    d[n - 1] = -fwd(&rev);
    d[n - 2] = -fwd1(&rev);
    d
}

const D1_O6: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -0.75, 0.0, 0.75, -3.0 / 20.0, 1.0 / 60.0];
const D2_O6: [f64; 7] = [
    1.0 / 90.0,
    -3.0 / 20.0,
    1.5,
    -49.0 / 18.0,
    1.5,
    -3.0 / 20.0,
    1.0 / 90.0,
];

/// Sixth-order central first and second derivatives at index `j` (needs
/// three neighbours on each side).
fn derivatives_o6(f: &[f64], j: usize, h: f64) -> (f64, f64) {
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (k, (c1, c2)) in D1_O6.iter().zip(&D2_O6).enumerate() {
        let v = f[j + k - 3];
        d1 += c1 * v;
        d2 += c2 * v;
    }
    (d1 / h, d2 / (h * h))
}

/// Bound state (m, B, n): exponents, hypergeometric parameters and eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialSolution {
    pub m: i64,
    #[serde(rename = "B")]
    pub b: f64,
    pub n: u32,
    pub a_r: f64,
    pub b_r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_h: f64,
    /// Eigenvalue of b̂₋â.
    pub lambda: f64,
    /// Λ = λ + B/2.
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    /// Eigenvalue of â₊b̂, λ′ = λ + B.
    pub lambda_prime: f64,
    /// N = a_r + b_r + n.
    #[serde(rename = "N")]
    pub big_n: f64,
    /// Coefficients of F(−n, β, γ_h; y) in powers of y = sin²(r/2).
    pub poly_coeffs: Vec<f64>,
}

impl RadialSolution {
    pub fn field(&self) -> FieldConfig {
        FieldConfig::new(self.b, self.m)
    }

    /// Terminating series P_n(y).
    pub fn polynomial(&self, y: f64) -> f64 {
        self.poly_coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    fn polynomial_derivatives(&self, y: f64) -> (f64, f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut d2p = 0.0;
        for c in self.poly_coeffs.iter().rev() {
            d2p = d2p * y + 2.0 * dp;
            dp = dp * y + p;
            p = p * y + c;
        }
        (p, dp, d2p)
    }

    /// log|prefactor| = |m|·ln sin(r/2) + |m+2B|·ln cos(r/2).
    fn log_prefactor(&self, r: f64) -> f64 {
        let term = |exp: f64, base: f64| if exp == 0.0 { 0.0 } else { exp * base.ln() };
        term(2.0 * self.a_r, (0.5 * r).sin()) + term(2.0 * self.b_r, (0.5 * r).cos())
    }

    /// Unnormalized R(r) (may underflow for extreme quantum numbers).
    pub fn evaluate(&self, r: f64) -> f64 {
        let y = (0.5 * r).sin().powi(2);
        self.log_prefactor(r).exp() * self.polynomial(y)
    }

    /// Residual of the hypergeometric-form ODE in y for the unnormalized
    /// function, with derivatives taken analytically. Divided by the largest
    /// term magnitude.
    pub fn analytic_ode_residual(&self, r: f64) -> f64 {
        let y = (0.5 * r).sin().powi(2);
        let (a, b) = (self.a_r, self.b_r);
        let (p, dp, d2p) = self.polynomial_derivatives(y);
        let lw = a / y - b / (1.0 - y);
        let lw2 = lw * lw - a / (y * y) - b / ((1.0 - y) * (1.0 - y));
        // R = w·P with w'/w = lw, w''/w = lw2; everything divided by w.
        let r0 = p;
        let r1 = dp + lw * p;
        let r2 = d2p + 2.0 * lw * dp + lw2 * p;
        let m = self.m as f64;
        let mb = m + 2.0 * self.b;
        let terms = [
            y * (1.0 - y) * r2,
            (1.0 - 2.0 * y) * r1,
            -0.25 * (m * m / y - 4.0 * self.b * self.b + mb * mb / (1.0 - y)) * r0,
            (self.b + 2.0 * self.lambda) * r0,
        ];
        let scale = terms.iter().fold(0.0f64, |s, t| s.max(t.abs()));
        let sum: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            sum.abs() / scale
        }
    }
}

fn validate(b: f64, n: i64) -> Result<u32, RadialError> {
    if !b.is_finite() {
        return Err(RadialError::NonFiniteField(b));
    }
    u32::try_from(n).map_err(|_| RadialError::NegativeN(n))
}

/// Quantized bound state for integer m, field B and radial number n.
pub fn quantize(m: i64, b: f64, n: i64) -> Result<RadialSolution, RadialError> {
    let n = validate(b, n)?;
    let a_r = m.unsigned_abs() as f64 / 2.0;
    let b_r = (m as f64 + 2.0 * b).abs() / 2.0;
    let nf = f64::from(n);
    let root = a_r + b_r + 0.5 + nf;
    // 2λ + (B+½)² = root² and root ≥ ½ > 0.
    let lambda = 0.5 * (root * root - (b + 0.5).powi(2));
    if !(2.0 * lambda + (b + 0.5).powi(2) > 0.0) {
        return Err(RadialError::NonPositiveRoot(2.0 * lambda + (b + 0.5).powi(2)));
    }
    let alpha = a_r + b_r + 0.5 - (2.0 * lambda + (b + 0.5).powi(2)).sqrt();
    let beta = 2.0 * a_r + 2.0 * b_r + 1.0 + nf;
    let gamma_h = m.unsigned_abs() as f64 + 1.0;
    let poly_coeffs = hypergeometric_coefficients(n, beta, gamma_h);
    Ok(RadialSolution {
        m,
        b,
        n,
        a_r,
        b_r,
        // α = −n up to rounding; keep the exact integer.
        alpha: if (alpha + nf).abs() < 1e-9 * (1.0 + nf) { -nf } else { alpha },
        beta,
        gamma_h,
        lambda,
        big_lambda: lambda + 0.5 * b,
        lambda_prime: lambda + b,
        big_n: a_r + b_r + nf,
        poly_coeffs,
    })
}

/// Like [`quantize`] but validates that `m` is an integer first.
pub fn quantize_real_m(m: f64, b: f64, n: i64) -> Result<RadialSolution, RadialError> {
    if m.fract() != 0.0 || !m.is_finite() {
        return Err(RadialError::NonIntegerM(m));
    }
    quantize(m as i64, b, n)
}

/// Coefficients of F(−n, β, γ; y) = Σ c_k y^k.
pub fn hypergeometric_coefficients(n: u32, beta: f64, gamma: f64) -> Vec<f64> {
    let alpha = -f64::from(n);
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for k in 0..n {
        let kf = f64::from(k);
        c *= (kf + alpha) * (kf + beta) / ((kf + 1.0) * (kf + gamma));
        coeffs.push(c);
    }
    coeffs
}

/// Samples R on the grid, normalized to unit sup-norm. Values that would be
/// subnormal after normalization are flushed to zero.
pub fn radial_wavefunction(sol: &RadialSolution, r_grid: &[f64]) -> Result<Vec<f64>, RadialError> {
    let logs: Vec<(f64, f64)> = r_grid
        .iter()
        .map(|&r| {
            let y = (0.5 * r).sin().powi(2);
            let p = sol.polynomial(y);
            (sol.log_prefactor(r) + p.abs().ln(), p.signum())
        })
        .collect();
    let max_log = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    if !(max_log >= f64::MIN_POSITIVE.ln()) {
        return Err(RadialError::PrefactorUnderflow { max_log });
    }
    Ok(logs
        .into_iter()
        .map(|(l, s)| {
            let v = (l - max_log).exp();
            if v < f64::MIN_POSITIVE {
                0.0
            } else {
                s * v
            }
        })
        .collect())
}

/// Max relative residual of the radial ODE
/// `y(1−y)R_yy + (1−2y)R_y − ¼(m²/y − 4B² + (m+2B)²/(1−y))R + (B+2λ)R = 0`
/// with derivatives from sixth-order central differences on the grid.
///
/// The derivative part is evaluated through the identity
/// `y(1−y)∂²_y + (1−2y)∂_y = ∂²_r + cot r ∂_r`. The worst residual is
/// divided by the largest term magnitude over the grid, floored by ‖R‖∞.
pub fn ode_residual(sol: &RadialSolution, grid: &RadialGrid) -> Result<f64, RadialError> {
    if grid.len() < 7 {
        return Err(RadialError::GridTooSmall {
            needed: 7,
            got: grid.len(),
        });
    }
    let f = radial_wavefunction(sol, &grid.points)?;
    let h = grid.step;
    let m = sol.m as f64;
    let mb = m + 2.0 * sol.b;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 3..grid.len() - 3 {
        let r = grid.points[j];
        let y = (0.5 * r).sin().powi(2);
        let (d1, d2) = derivatives_o6(&f, j, h);
        let kinetic = d2 + r.cos() / r.sin() * d1;
        let potential = -0.25 * (m * m / y - 4.0 * sol.b * sol.b + mb * mb / (1.0 - y)) * f[j];
        let spectral = (sol.b + 2.0 * sol.lambda) * f[j];
        scale = scale.max(f[j].abs()).max(d2.abs()).max(kinetic.abs()).max(potential.abs()).max(spectral.abs());
        worst = worst.max((kinetic + potential + spectral).abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

/// Residuals of `b̂₋â R = λR` and `â₊b̂ R = λ′R` with the ladder operators
/// applied as successive fourth-order finite differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenRelationReport {
    pub lambda: f64,
    pub lambda_prime: f64,
    /// ‖b̂₋â R − λR‖∞ / ‖R‖∞ on the interior.
    pub lower_residual: f64,
    /// ‖â₊b̂ R − λ′R‖∞ / ‖R‖∞ on the interior.
    pub upper_residual: f64,
    /// Least-squares estimate of c in â₊b̂R − b̂₋âR = c·R.
    pub measured_shift: f64,
    pub step: f64,
}

/// Number of points dropped at each end of the grid when measuring
/// finite-difference residuals (the composed stencil is one-sided there).
pub const EDGE_POINTS: usize = 2;

pub fn verify_eigenrelation(
    sol: &RadialSolution,
    grid: &RadialGrid,
) -> Result<EigenRelationReport, RadialError> {
    if grid.len() < 2 * EDGE_POINTS + 3 {
        return Err(RadialError::GridTooSmall {
            needed: 2 * EDGE_POINTS + 3,
            got: grid.len(),
        });
    }
    let f = radial_wavefunction(sol, &grid.points)?;
    let ops = make_operators(sol.field());
    let lower = ops.b_minus_a(grid, &f);
    let upper = ops.a_plus_b(grid, &f);
    let range = EDGE_POINTS..grid.len() - EDGE_POINTS;
    let norm = f[range.clone()].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lo: f64 = 0.0;
    let mut up: f64 = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for j in range {
        lo = lo.max((lower[j] - sol.lambda * f[j]).abs());
        up = up.max((upper[j] - sol.lambda_prime * f[j]).abs());
        num += (upper[j] - lower[j]) * f[j];
        den += f[j] * f[j];
    }
    Ok(EigenRelationReport {
        lambda: sol.lambda,
        lambda_prime: sol.lambda_prime,
        lower_residual: lo / norm,
        upper_residual: up / norm,
        measured_shift: if den > 0.0 { num / den } else { 0.0 },
        step: grid.step,
    })
}

/// `index`-th eigenvalue of b̂₋â discretized on `cells` cells.
///
/// Uses the self-adjoint form `−(sin r·R′)′ + (ν²/sin r − B sin r)R = 2λ sin r·R`
/// on a cell-centred grid. The flux weight sin r vanishes at both ends, so
/// the regular behaviour at r = 0 and r = π is built in without explicit
/// boundary rows.
pub fn discrete_eigenvalue(cfg: &FieldConfig, cells: usize, index: usize) -> Result<f64, RadialError> {
    if cells < 3 {
        return Err(RadialError::GridTooSmall {
            needed: 3,
            got: cells,
        });
    }
    let h = PI / cells as f64;
    let h2 = h * h;
    let mut diag = Vec::with_capacity(cells);
    let mut weight = Vec::with_capacity(cells);
    for j in 0..cells {
        let r = (j as f64 + 0.5) * h;
        let s = r.sin();
        let left = (j as f64 * h).sin();
        let right = ((j + 1) as f64 * h).sin();
        let nu = cfg.nu(r);
        diag.push((left + right) / h2 + (nu * nu / (s * s) - cfg.b) * s);
        weight.push(s);
    }
    // Symmetric scaling W^{-1/2} A W^{-1/2}.
    let off: Vec<f64> = (0..cells - 1)
        .map(|j| {
            let flux = ((j + 1) as f64 * h).sin();
            -flux / h2 / (weight[j] * weight[j + 1]).sqrt()
        })
        .collect();
    let diag: Vec<f64> = diag.iter().zip(&weight).map(|(d, w)| d / w).collect();
    Ok(0.5 * tridiagonal_eigenvalue(&diag, &off, index)?)
}

/// Errors of the discretized b̂₋â eigenvalue against the closed form over a
/// sequence of grids, with the ratios of successive errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorConvergence {
    pub m: i64,
    #[serde(rename = "B")]
    pub b: f64,
    pub n: u32,
    pub exact: f64,
    pub cells: Vec<usize>,
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
}

pub fn operator_convergence(
    m: i64,
    b: f64,
    n: u32,
    cells: &[usize],
) -> Result<OperatorConvergence, RadialError> {
    let exact = quantize(m, b, i64::from(n))?.lambda;
    let cfg = FieldConfig::new(b, m);
    let errors = cells
        .iter()
        .map(|&c| discrete_eigenvalue(&cfg, c, n as usize).map(|v| (v - exact).abs()))
        .collect::<Result<Vec<_>, _>>()?;
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(OperatorConvergence {
        m,
        b,
        n,
        exact,
        cells: cells.to_vec(),
        errors,
        ratios,
    })
}

/// Exact quantization data for rational B.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLevel {
    pub m: i64,
    pub b: BigRational,
    pub n: u32,
    pub a_r: BigRational,
    pub b_r: BigRational,
    pub lambda: BigRational,
    pub lambda_prime: BigRational,
    pub big_lambda: BigRational,
    pub big_n: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn quantize_exact(m: i64, b: &BigRational, n: u32) -> ExactLevel {
    let half = rat(1, 2);
    let two = rat(2, 1);
    let mr = rat(m, 1);
    let a_r = mr.abs() * &half;
    let b_r = (&mr + &two * b).abs() * &half;
    let nr = rat(i64::from(n), 1);
    let root = &a_r + &b_r + &half + &nr;
    let shifted = b + &half;
    let lambda = (&root * &root - &shifted * &shifted) * &half;
    let big_lambda = &lambda + b * &half;
    let lambda_prime = &lambda + b;
    let big_n = &a_r + &b_r + &nr;
    ExactLevel {
        m,
        b: b.clone(),
        n,
        a_r,
        b_r,
        lambda,
        lambda_prime,
        big_lambda,
        big_n,
    }
}

impl ExactLevel {
    /// 2Λ + B² − N(N+1), which must vanish.
    pub fn spectrum_residual(&self) -> BigRational {
        let two = rat(2, 1);
        &two * &self.big_lambda + &self.b * &self.b - &self.big_n * (&self.big_n + BigRational::one())
    }

    /// 2Λ + B².
    pub fn two_lambda_plus_b2(&self) -> BigRational {
        rat(2, 1) * &self.big_lambda + &self.b * &self.b
    }

    /// N(N+1).
    pub fn n_times_n_plus_one(&self) -> BigRational {
        &self.big_n * (&self.big_n + BigRational::one())
    }

    /// β = 2a + 2b + 1 + n of F(−n, β, γ; y).
    pub fn beta(&self) -> BigRational {
        rat(2, 1) * (&self.a_r + &self.b_r) + rat(1 + i64::from(self.n), 1)
    }

    pub fn gamma_h(&self) -> BigRational {
        rat(self.m.abs() + 1, 1)
    }

    pub fn hypergeometric_coefficients(&self) -> Vec<BigRational> {
        let alpha = rat(-i64::from(self.n), 1);
        let beta = self.beta();
        let gamma = self.gamma_h();
        let mut out = vec![BigRational::one()];
        for k in 0..self.n {
            let kr = rat(i64::from(k), 1);
            let next = out[k as usize].clone() * (&kr + &alpha) * (&kr + &beta)
                / ((&kr + BigRational::one()) * (&kr + &gamma));
            out.push(next);
        }
        out
    }

    /// Checks term by term that the coefficients solve the hypergeometric
    /// equation `y(1−y)F″ + [γ − (α+β+1)y]F′ − αβF = 0` with α = −n, and
    /// that (α, β) satisfy the sum/product relations with the exponents and λ.
    pub fn check_hypergeometric(&self) -> bool {
        let alpha = rat(-i64::from(self.n), 1);
        let beta = self.beta();
        let gamma = self.gamma_h();
        let ab = &self.a_r + &self.b_r;
        let sum_ok = &alpha + &beta == rat(2, 1) * &ab + BigRational::one();
        let product_ok = &alpha * &beta
            == &ab * (&ab + BigRational::one()) - &self.b * &self.b - (&self.b + rat(2, 1) * &self.lambda);
        let c = self.hypergeometric_coefficients();
        let coeff = |k: usize| c.get(k).cloned().unwrap_or_else(BigRational::zero);
        // Coefficient of y^k: (k+1)(k+γ)c_{k+1} − (k+α)(k+β)c_k.
        let series_ok = (0..=self.n as usize + 1).all(|k| {
            let kr = rat(k as i64, 1);
            (&kr + BigRational::one()) * (&kr + &gamma) * coeff(k + 1)
                - (&kr + &alpha) * (&kr + &beta) * coeff(k)
                == BigRational::zero()
        });
        sum_ok && product_ok && series_ok
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// The lattice |m| ≤ 3, B ∈ {0, ±½, ±1, 2}, n ≤ 4.
pub fn standard_lattice() -> Vec<(i64, BigRational, u32)> {
    let fields = [rat(0, 1), rat(1, 2), rat(-1, 2), rat(1, 1), rat(-1, 1), rat(2, 1)];
    let mut out = Vec::new();
    for m in -3..=3 {
        for b in &fields {
            for n in 0..=4 {
                out.push((m, b.clone(), n));
            }
        }
    }
    out
}
