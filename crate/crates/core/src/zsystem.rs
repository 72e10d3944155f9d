//! Singular-point analysis and numerical solution of the coupled z-system.
//!
//! In the variable x = sin z the three channels (Z₁, Z̄₂, Z₃) obey a coupled
//! second-order system with regular singular points at x = ±1. Near each end
//! a common power (1 ∓ x)^a gives the indicial relation 2a² − a = A, where A
//! is an eigenvalue of the 3×3 matrix
//!
//! ```text
//!     ⎡ λ   −λ   0  ⎤
//! T = ⎢ −1   K  −1  ⎥ ,   K = (2 + λ + λ′)/2,
//!     ⎣ 0  −λ′   λ′ ⎦
//! ```
//!
//! i.e. a root of A³ − (3Λ+1)A² + (3Λ² − B²/4)A − (Λ² − B²/4)(Λ − 1) = 0 with
//! λ = Λ − B/2, λ′ = Λ + B/2.
//!
//! In z the system is a Schrödinger-type problem `−Z″ + V(z)Z = 2εM·Z` on
//! (−π/2, π/2) with 1/cos²z singular potentials, discretized here with
//! second-order differences on a uniform z-grid and Dirichlet ends.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{BandMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZError {
    #[error("root A = {re} + {im}i gives complex exponents (1 + 8A < 0): oscillatory endpoint")]
    OscillatoryEndpoint { re: f64, im: f64 },
    #[error("root index {0} out of range (0..3)")]
    RootIndex(usize),
    #[error("channel eigenvalues must be non-negative, got λ = {lambda}, λ′ = {lambda_prime}")]
    NegativeChannel { lambda: f64, lambda_prime: f64 },
    #[error("parameters must be finite")]
    NonFinite,
    #[error("grid of {0} points is too small")]
    GridTooSmall(usize),
    #[error("requested eigenvalue index {index} but only {nev} computed")]
    IndexOutOfRange { index: usize, nev: usize },
    #[error("discrete eigenvalue {re} + {im}i is not real within tolerance")]
    ComplexEigenvalue { re: f64, im: f64 },
    #[error("subspace iteration stalled after {0} iterations")]
    IterationLimit(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Channel parameters (λ, λ′) for given Λ and B.
pub fn channel_parameters(big_lambda: f64, b: f64) -> (f64, f64) {
    (big_lambda - 0.5 * b, big_lambda + 0.5 * b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CubicBranch {
    /// Three real roots from the trigonometric form.
    Trigonometric,
    /// One real root and a complex pair from Cardano's radicals.
    Cardano,
    /// p = 0: roots from a direct cube root of −q.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndicialSpectrum {
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// (a_c, b_c, c_c) of A³ + a_c A² + b_c A + c_c.
    pub cubic_coeffs: [f64; 3],
    pub p: f64,
    pub q: f64,
    /// (q/2)² + (p/3)³.
    pub discriminant: f64,
    /// Cardano angle, only on the trigonometric branch.
    pub phi: Option<f64>,
    pub branch: CubicBranch,
    /// Roots of the depressed cubic (real parts).
    pub depressed: [f64; 3],
    /// Roots A = Y + Λ + 1/3 (real parts), real ones ascending.
    pub roots: [f64; 3],
    /// Imaginary parts of the roots.
    pub roots_im: [f64; 3],
}

impl IndicialSpectrum {
    pub fn shift(&self) -> f64 {
        self.big_lambda + 1.0 / 3.0
    }

    pub fn is_real(&self) -> bool {
        self.roots_im.iter().all(|&v| v == 0.0)
    }

    /// A³ + a_c A² + b_c A + c_c at a real argument.
    pub fn polynomial(&self, a: f64) -> f64 {
        let [ac, bc, cc] = self.cubic_coeffs;
        ((a + ac) * a + bc) * a + cc
    }

    pub fn root(&self, k: usize) -> Complex64 {
        Complex64::new(self.roots[k], self.roots_im[k])
    }

    /// |P(A_k)| / max(1, |A_k|³), evaluated in complex arithmetic.
    pub fn scaled_residual(&self, k: usize) -> f64 {
        let [ac, bc, cc] = self.cubic_coeffs;
        let a = self.root(k);
        let value = ((a + ac) * a + bc) * a + cc;
        value.norm() / a.norm().powi(3).max(1.0)
    }
}

pub fn cubic_coefficients(big_lambda: f64, b: f64) -> [f64; 3] {
    let l = big_lambda;
    let b2 = 0.25 * b * b;
    [-(3.0 * l + 1.0), 3.0 * l * l - b2, -(l * l - b2) * (l - 1.0)]
}

/// Depressed-cubic coefficients (p, q) after A = Y + Λ + 1/3.
pub fn depressed_coefficients(big_lambda: f64, b: f64) -> (f64, f64) {
    let b2 = b * b;
    (
        -(2.0 * big_lambda + 0.25 * b2 + 1.0 / 3.0),
        -(2.0 * big_lambda / 3.0 + b2 / 3.0 + 2.0 / 27.0),
    )
}

/// Solves the indicial cubic for (Λ, B).
pub fn indicial_cubic(big_lambda: f64, b: f64) -> Result<IndicialSpectrum, ZError> {
    if !big_lambda.is_finite() || !b.is_finite() {
        return Err(ZError::NonFinite);
    }
    let (lambda, lambda_prime) = channel_parameters(big_lambda, b);
    let cubic_coeffs = cubic_coefficients(big_lambda, b);
    let (p, q) = depressed_coefficients(big_lambda, b);
    let discriminant = (0.5 * q).powi(2) + (p / 3.0).powi(3);
    let sqrt3 = 3f64.sqrt();
    let mut depressed_im = [0.0; 3];
    let (branch, phi, mut depressed) = if p == 0.0 {
        let y = (-q).cbrt();
        depressed_im = [0.0, 0.5 * sqrt3 * y, -0.5 * sqrt3 * y];
        if y == 0.0 {
            depressed_im = [0.0; 3];
        }
        (CubicBranch::Degenerate, None, [y, -0.5 * y, -0.5 * y])
    } else if discriminant <= 0.0 {
        // p < 0 here
        let rho = (-p / 3.0).sqrt();
        let cos_phi = ((-0.5 * q) / rho.powi(3)).clamp(-1.0, 1.0);
        let phi = cos_phi.acos();
        let (s, c) = (phi / 3.0).sin_cos();
        (
            CubicBranch::Trigonometric,
            Some(phi),
            [2.0 * rho * c, rho * (-c - sqrt3 * s), rho * (-c + sqrt3 * s)],
        )
    } else {
        let root = discriminant.sqrt();
        let u = (-0.5 * q + root).cbrt();
        let v = (-0.5 * q - root).cbrt();
        let im = 0.5 * sqrt3 * (u - v);
        depressed_im = [0.0, im, -im];
        (CubicBranch::Cardano, None, [u + v, -0.5 * (u + v), -0.5 * (u + v)])
    };
    let shift = big_lambda + 1.0 / 3.0;
    let mut roots = depressed.map(|y| y + shift);
    if branch == CubicBranch::Trigonometric {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| roots[i].total_cmp(&roots[j]));
        roots = order.map(|i| roots[i]);
        depressed = order.map(|i| depressed[i]);
    }
    Ok(IndicialSpectrum {
        big_lambda,
        b,
        lambda,
        lambda_prime,
        cubic_coeffs,
        p,
        q,
        discriminant,
        phi,
        branch,
        depressed,
        roots,
        roots_im: depressed_im,
    })
}

/// The sign and size inequalities p < 0, q < 0, |p| > |q| at one (Λ, B).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub p: f64,
    pub q: f64,
    pub p_negative: bool,
    pub q_negative: bool,
    pub p_dominates: bool,
}

pub fn inequality_check(big_lambda: f64, b: f64) -> InequalityCheck {
    let (p, q) = depressed_coefficients(big_lambda, b);
    InequalityCheck {
        big_lambda,
        b,
        p,
        q,
        p_negative: p < 0.0,
        q_negative: q < 0.0,
        p_dominates: p.abs() > q.abs(),
    }
}

/// Exponent pair of 2a² − a = A.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    pub root: f64,
    /// (1 + √(1+8A))/4, the regular branch.
    pub regular: f64,
    /// (1 − √(1+8A))/4.
    pub singular: f64,
    /// Whether the regular branch is strictly positive.
    pub regular_positive: bool,
}

pub fn exponent_pair(root: f64) -> Result<ExponentPair, ZError> {
    let disc = 1.0 + 8.0 * root;
    if disc < 0.0 {
        return Err(ZError::OscillatoryEndpoint { re: root, im: 0.0 });
    }
    let s = disc.sqrt();
    let regular = 0.25 * (1.0 + s);
    Ok(ExponentPair {
        root,
        regular,
        singular: 0.25 * (1.0 - s),
        regular_positive: regular > 0.0,
    })
}

/// Exponent pairs for all three roots; complex roots or 1 + 8A < 0 are
/// reported as oscillatory endpoints.
pub fn frobenius_exponents(spec: &IndicialSpectrum) -> Vec<Result<ExponentPair, ZError>> {
    spec.roots
        .iter()
        .zip(&spec.roots_im)
        .map(|(&re, &im)| {
            if im != 0.0 {
                Err(ZError::OscillatoryEndpoint { re, im })
            } else {
                exponent_pair(re)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    /// x → −1
    Left,
    /// x → +1
    Right,
}

/// Rows of the homogeneous 3×3 system for the leading amplitudes at an
/// endpoint, for a given root A.
pub fn endpoint_system(lambda: f64, lambda_prime: f64, a: f64, end: Endpoint) -> [[f64; 3]; 3] {
    let k = 0.5 * (2.0 + lambda + lambda_prime);
    match end {
        Endpoint::Right => [
            [a - lambda, lambda, 0.0],
            [0.0, lambda_prime, a - lambda_prime],
            [1.0, a - k, 1.0],
        ],
        Endpoint::Left => [
            [a - lambda, -lambda, 0.0],
            [0.0, -lambda_prime, a - lambda_prime],
            [-1.0, a - k, -1.0],
        ],
    }
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Unit null vector of the endpoint system: the largest cross product of
/// two rows. Works through the degenerate cases A = λ or A = λ′.
pub fn family_vector(lambda: f64, lambda_prime: f64, a: f64, end: Endpoint) -> [f64; 3] {
    let rows = endpoint_system(lambda, lambda_prime, a, end);
    let best = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(rows[i], rows[j]))
        .max_by(|u, v| norm3(*u).total_cmp(&norm3(*v)))
        .unwrap_or([0.0; 3]);
    let n = norm3(best);
    if n == 0.0 {
        return [0.0, 1.0, 0.0];
    }
    let mut out = best.map(|c| c / n);
    // deterministic sign: largest component positive
    let lead = out
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if lead < 0.0 {
        out = out.map(|c| -c);
    }
    out
}

/// Max |row · v| / (|row|·|v|) over the three rows.
pub fn endpoint_residual(lambda: f64, lambda_prime: f64, a: f64, end: Endpoint, v: [f64; 3]) -> f64 {
    let rows = endpoint_system(lambda, lambda_prime, a, end);
    rows.iter()
        .map(|r| {
            let dot: f64 = r.iter().zip(&v).map(|(x, y)| x * y).sum();
            let scale = norm3(*r) * norm3(v);
            if scale == 0.0 {
                0.0
            } else {
                dot.abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplitudeRatios {
    pub root: f64,
    /// A₁/A₂ = λ/(λ − A) at x → +1.
    pub a1_over_a2: f64,
    /// A₃/A₂ = λ′/(λ′ − A) at x → +1.
    pub a3_over_a2: f64,
    /// B₁/B₂ = −λ/(λ − A) at x → −1.
    pub b1_over_b2: f64,
    /// B₃/B₂ = −λ′/(λ′ − A) at x → −1.
    pub b3_over_b2: f64,
    /// A coincides with λ or λ′; the middle amplitude vanishes and the
    /// family is given by [`family_vector`].
    pub degenerate: bool,
    pub right_family: [f64; 3],
    pub left_family: [f64; 3],
}

/// Relative distance below which a root counts as equal to λ or λ′.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub fn amplitude_ratios(spec: &IndicialSpectrum, root_index: usize) -> Result<AmplitudeRatios, ZError> {
    if root_index >= 3 {
        return Err(ZError::RootIndex(root_index));
    }
    let a = spec.roots[root_index];
    if spec.roots_im[root_index] != 0.0 {
        return Err(ZError::OscillatoryEndpoint {
            re: a,
            im: spec.roots_im[root_index],
        });
    }
    let (l, lp) = (spec.lambda, spec.lambda_prime);
    let near = |x: f64| (x - a).abs() <= DEGENERACY_TOL * (1.0 + a.abs());
    let degenerate = near(l) || near(lp);
    let ratio = |c: f64| {
        if near(c) {
            f64::INFINITY
        } else {
            c / (c - a)
        }
    };
    let r1 = ratio(l);
    let r3 = ratio(lp);
    Ok(AmplitudeRatios {
        root: a,
        a1_over_a2: r1,
        a3_over_a2: r3,
        b1_over_b2: -r1,
        b3_over_b2: -r3,
        degenerate,
        right_family: family_vector(l, lp, a, Endpoint::Right),
        left_family: family_vector(l, lp, a, Endpoint::Left),
    })
}

// ---------------------------------------------------------------------------
// Boundary-value eigenproblem

/// Solver settings. Tolerances are defaults and may be overridden.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZSolveConfig {
    /// Base number of interior grid points.
    pub grid: usize,
    /// Number of lowest eigenvalues to compute.
    pub nev: usize,
    /// Number of grids in the refinement sequence (grid, 2·grid, ...).
    pub refinements: usize,
    /// Maximum accepted |Im μ| / |Re μ|.
    pub imag_tol: f64,
    /// Relative change of the Ritz values that ends subspace iteration.
    pub ritz_tol: f64,
    pub max_iterations: usize,
    /// Seed for the starting block.
    pub seed: u64,
}

impl Default for ZSolveConfig {
    fn default() -> Self {
        Self {
            grid: 400,
            nev: 5,
            refinements: 3,
            imag_tol: 1e-8,
            ritz_tol: 1e-13,
            max_iterations: 5000,
            seed: 0,
        }
    }
}

/// Extra vectors carried in the iteration block beyond `nev`.
pub const GUARD_VECTORS: usize = 4;

/// Uniform interior z-grid z_j = (j + 1 − (N+1)/2)·h, h = π/(N+1).
/// The offsets are exact half-integers, so the grid is exactly symmetric.
pub fn z_grid(n: usize) -> (Vec<f64>, f64) {
    let h = PI / (n as f64 + 1.0);
    let mid = 0.5 * (n as f64 + 1.0);
    ((0..n).map(|j| (j as f64 + 1.0 - mid) * h).collect(), h)
}

/// Discretization of the z-operator with unknowns interleaved as 3j + channel.
pub fn z_operator(lambda: f64, lambda_prime: f64, n: usize) -> BandMatrix {
    let (z, h) = z_grid(n);
    let inv_h2 = 1.0 / (h * h);
    let mut a = BandMatrix::zeros(3 * n, 3, 3);
    for (j, &zj) in z.iter().enumerate() {
        let c2 = zj.cos().powi(2);
        let s = zj.sin();
        for ch in 0..3 {
            let i = 3 * j + ch;
            a.add(i, i, 2.0 * inv_h2);
            if j > 0 {
                a.add(i, i - 3, -inv_h2);
            }
            if j + 1 < n {
                a.add(i, i + 3, -inv_h2);
            }
        }
        let (i0, i1, i2) = (3 * j, 3 * j + 1, 3 * j + 2);
        a.add(i0, i0, 2.0 * lambda / c2);
        a.add(i0, i1, -2.0 * lambda * s / c2);
        a.add(i2, i2, 2.0 * lambda_prime / c2);
        a.add(i2, i1, -2.0 * lambda_prime * s / c2);
        a.add(i1, i1, (2.0 + lambda + lambda_prime) / c2 - 1.0);
        a.add(i1, i0, -2.0 * s / c2);
        a.add(i1, i2, -2.0 * s / c2);
    }
    a
}

/// Eigenpairs of one discretization.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSpectrum {
    pub n: usize,
    pub values: Vec<f64>,
    /// Eigenvectors, interleaved as 3j + channel.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn dense(a: &BandMatrix) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

/// Lowest real part of the spectrum of a coarse discretization; used to
/// place the shift below the wanted eigenvalues.
fn coarse_lower_bound(lambda: f64, lambda_prime: f64) -> f64 {
    let coarse = dense(&z_operator(lambda, lambda_prime, 48));
    let min = coarse
        .complex_eigenvalues()
        .iter()
        .map(|c| c.re)
        .fold(f64::INFINITY, f64::min);
    min - 1.0 - 0.1 * min.abs()
}

fn orthonormalize(block: DMatrix<f64>) -> DMatrix<f64> {
    block.qr().q()
}

/// Lowest `nev` eigenpairs of the discretization on `n` points by subspace
/// inverse iteration with Rayleigh–Ritz projection.
pub fn discrete_spectrum(
    lambda: f64,
    lambda_prime: f64,
    n: usize,
    cfg: &ZSolveConfig,
) -> Result<DiscreteSpectrum, ZError> {
    let op = z_operator(lambda, lambda_prime, n);
    let sigma = coarse_lower_bound(lambda, lambda_prime);
    let dim = op.dim();
    let block = (cfg.nev + GUARD_VECTORS).min(dim);
    let lu = op.shifted_lu(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut q = orthonormalize(DMatrix::from_fn(dim, block, |_, _| rng.gen_range(-1.0..1.0)));
    let mut previous: Option<Vec<f64>> = None;
    let mut buf = vec![0.0; dim];
    for it in 1..=cfg.max_iterations {
        let mut next = DMatrix::zeros(dim, block);
        for c in 0..block {
            buf.copy_from_slice(q.column(c).as_slice());
            lu.solve(&mut buf);
            next.column_mut(c).copy_from_slice(&buf);
        }
        q = orthonormalize(next);
        let h = project(&op, &q);
        let mut ritz: Vec<(f64, f64)> = h.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
        ritz.sort_by(|a, b| a.0.total_cmp(&b.0));
        let wanted: Vec<f64> = ritz.iter().take(cfg.nev).map(|r| r.0).collect();
        let settled = previous.as_ref().is_some_and(|p| {
            p.iter()
                .zip(&wanted)
                .all(|(a, b)| (a - b).abs() <= cfg.ritz_tol * (1.0 + b.abs()))
        });
        previous = Some(wanted);
        if settled {
            for &(re, im) in ritz.iter().take(cfg.nev) {
                if im.abs() > cfg.imag_tol * re.abs() {
                    return Err(ZError::ComplexEigenvalue { re, im });
                }
            }
            let values: Vec<f64> = ritz.iter().take(cfg.nev).map(|r| r.0).collect();
            let vectors = ritz_vectors(&h, &q, &values);
            return Ok(DiscreteSpectrum {
                n,
                values,
                vectors,
                iterations: it,
            });
        }
    }
    Err(ZError::IterationLimit(cfg.max_iterations))
}

fn project(op: &BandMatrix, q: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = q.nrows();
    let mut aq = DMatrix::zeros(dim, q.ncols());
    let mut y = vec![0.0; dim];
    for c in 0..q.ncols() {
        op.matvec(q.column(c).as_slice(), &mut y);
        aq.column_mut(c).copy_from_slice(&y);
    }
    q.transpose() * &aq
}

/// Ritz vectors for the given (real) Ritz values. Clusters of equal values
/// take successive right singular vectors of H − μI.
fn ritz_vectors(h: &DMatrix<f64>, q: &DMatrix<f64>, values: &[f64]) -> Vec<Vec<f64>> {
    let p = h.nrows();
    let mut out = Vec::with_capacity(values.len());
    let mut k = 0;
    while k < values.len() {
        let mu = values[k];
        let mut mult = 1;
        while k + mult < values.len() && (values[k + mult] - mu).abs() <= 1e-8 * (1.0 + mu.abs()) {
            mult += 1;
        }
        let shifted = h - DMatrix::identity(p, p) * mu;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested V");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for &idx in order.iter().take(mult) {
            let coeffs = DVector::from_iterator(p, vt.row(idx).iter().copied());
            out.push(normalize_sign(q * coeffs));
        }
        k += mult;
    }
    out
}

/// Unit sup-norm with the largest-magnitude entry positive.
fn normalize_sign(v: DVector<f64>) -> Vec<f64> {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if lead == 0.0 {
        return v.iter().copied().collect();
    }
    v.iter().map(|c| c / lead).collect()
}

/// One computed eigenstate of the z-system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZEigenSolution {
    pub lambda: f64,
    pub lambda_prime: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub index: usize,
    /// x = sin z on the finest grid.
    pub grid: Vec<f64>,
    #[serde(rename = "Z1")]
    pub z1: Vec<f64>,
    #[serde(rename = "Z2bar")]
    pub z2bar: Vec<f64>,
    #[serde(rename = "Z3")]
    pub z3: Vec<f64>,
    /// 2εM on the finest grid.
    #[serde(rename = "eps2M")]
    pub eps2m: f64,
    pub left_exponent: f64,
    pub right_exponent: f64,
    /// Regular exponent of the Frobenius family matching the computed
    /// channel direction at each end.
    pub designated_left: Option<f64>,
    pub designated_right: Option<f64>,
    /// (grid size, 2εM) per refinement level.
    pub refinement_history: Vec<(usize, f64)>,
    pub converged: bool,
}

impl ZEigenSolution {
    pub fn finest_grid(&self) -> usize {
        self.grid.len()
    }

    /// Relative mismatch of fitted against designated exponents (worst end).
    pub fn exponent_mismatch(&self) -> Option<f64> {
        let l = self.designated_left?;
        let r = self.designated_right?;
        Some(((self.left_exponent - l).abs() / l).max((self.right_exponent - r).abs() / r))
    }

    /// For B = 0: distance between the state and its image under
    /// (Z₁, Z̄₂, Z₃)(x) → (Z₃(−x), −Z̄₂(−x), Z₁(−x)), up to overall sign.
    pub fn parity_residual(&self) -> f64 {
        let n = self.grid.len();
        let mismatch = |sign: f64| {
            (0..n)
                .map(|j| {
                    let k = n - 1 - j;
                    (self.z1[j] - sign * self.z3[k])
                        .abs()
                        .max((self.z2bar[j] + sign * self.z2bar[k]).abs())
                        .max((self.z3[j] - sign * self.z1[k]).abs())
                })
                .fold(0.0, f64::max)
        };
        mismatch(1.0).min(mismatch(-1.0))
    }
}

/// Points kept in the endpoint fitting window: 1 ∓ x between t0 and 10·t0,
/// t0 = max(FIT_FLOOR, value at the third point from the end).
pub const FIT_FLOOR: f64 = 1e-5;

/// Distances 1 + x (left) and 1 − x (right) at the grid points, computed
/// without cancellation.
fn endpoint_distances(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n as f64 + 1.0);
    let dist = |k: usize| 2.0 * (0.5 * k as f64 * h).sin().powi(2);
    let left = (0..n).map(|j| dist(j + 1)).collect();
    let right = (0..n).map(|j| dist(n - j)).collect();
    (left, right)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fitted exponent of ‖(Z₁, Z̄₂, Z₃)‖ near one end, and the unit channel
/// direction at the window point closest to the end.
fn fit_endpoint(dist: &[f64], vector: &[f64], end: Endpoint) -> (f64, [f64; 3]) {
    let n = dist.len();
    let order: Vec<usize> = match end {
        Endpoint::Left => (0..n).collect(),
        Endpoint::Right => (0..n).rev().collect(),
    };
    let t0 = dist[order[2.min(n - 1)]].max(FIT_FLOOR);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut direction = [0.0; 3];
    for &j in &order {
        let t = dist[j];
        if t > 10.0 * t0 {
            break;
        }
        if t < t0 {
            continue;
        }
        let v = [vector[3 * j], vector[3 * j + 1], vector[3 * j + 2]];
        let norm = norm3(v);
        if xs.is_empty() {
            direction = v.map(|c| c / norm);
        }
        xs.push(t.ln());
        ys.push(norm.ln());
    }
    (least_squares_slope(&xs, &ys), direction)
}

/// Regular exponent of the real family whose amplitude vector is best
/// aligned with `direction`.
fn designated_exponent(spec: &IndicialSpectrum, direction: [f64; 3], end: Endpoint) -> Option<f64> {
    (0..3)
        .filter(|&k| spec.roots_im[k] == 0.0)
        .filter_map(|k| {
            let a = spec.roots[k];
            let pair = exponent_pair(a).ok()?;
            let fam = family_vector(spec.lambda, spec.lambda_prime, a, end);
            let cos: f64 = fam.iter().zip(&direction).map(|(x, y)| x * y).sum::<f64>().abs();
            Some((cos, pair.regular))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, e)| e)
}

fn validate(lambda: f64, lambda_prime: f64, cfg: &ZSolveConfig) -> Result<(), ZError> {
    if !lambda.is_finite() || !lambda_prime.is_finite() {
        return Err(ZError::NonFinite);
    }
    if lambda < 0.0 || lambda_prime < 0.0 {
        return Err(ZError::NegativeChannel {
            lambda,
            lambda_prime,
        });
    }
    if cfg.grid < 8 {
        return Err(ZError::GridTooSmall(cfg.grid));
    }
    Ok(())
}

/// Lowest `cfg.nev` eigenstates for the channel parameters (λ, λ′ = λ + B),
/// each with its refinement history over `cfg.refinements` grids.
pub fn solve_z_spectrum(lambda: f64, b: f64, cfg: &ZSolveConfig) -> Result<Vec<ZEigenSolution>, ZError> {
    let lambda_prime = lambda + b;
    validate(lambda, lambda_prime, cfg)?;
    let levels = cfg.refinements.max(1);
    let spectra = (0..levels)
        .map(|k| discrete_spectrum(lambda, lambda_prime, cfg.grid << k, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let finest = spectra.last().expect("at least one level");
    let n = finest.n;
    let (z, _) = z_grid(n);
    let x: Vec<f64> = z.iter().map(|v| v.sin()).collect();
    let (left_d, right_d) = endpoint_distances(n);
    let big_lambda = lambda + 0.5 * b;
    let spec = indicial_cubic(big_lambda, b)?;
    Ok((0..cfg.nev.min(finest.values.len()))
        .map(|index| {
            let history: Vec<(usize, f64)> = spectra.iter().map(|s| (s.n, s.values[index])).collect();
            let v = &finest.vectors[index];
            let (left_exponent, left_dir) = fit_endpoint(&left_d, v, Endpoint::Left);
            let (right_exponent, right_dir) = fit_endpoint(&right_d, v, Endpoint::Right);
            ZEigenSolution {
                lambda,
                lambda_prime,
                big_lambda,
                b,
                index,
                grid: x.clone(),
                z1: v.iter().step_by(3).copied().collect(),
                z2bar: v.iter().skip(1).step_by(3).copied().collect(),
                z3: v.iter().skip(2).step_by(3).copied().collect(),
                eps2m: finest.values[index],
                left_exponent,
                right_exponent,
                designated_left: designated_exponent(&spec, left_dir, Endpoint::Left),
                designated_right: designated_exponent(&spec, right_dir, Endpoint::Right),
                converged: refinement_converged(&history),
                refinement_history: history,
            }
        })
        .collect())
}

/// Single eigenstate `which` (0-based, ascending).
pub fn solve_z_eigenproblem(
    lambda: f64,
    b: f64,
    grid_size: usize,
    which: usize,
) -> Result<ZEigenSolution, ZError> {
    let cfg = ZSolveConfig {
        grid: grid_size,
        nev: which + 1,
        ..ZSolveConfig::default()
    };
    let mut all = solve_z_spectrum(lambda, b, &cfg)?;
    if which >= all.len() {
        return Err(ZError::IndexOutOfRange {
            index: which,
            nev: all.len(),
        });
    }
    Ok(all.swap_remove(which))
}

/// Drift |μ(N_{k+1}) − μ(N_k)| shrinking along the sequence, or already at
/// roundoff level.
pub fn refinement_converged(history: &[(usize, f64)]) -> bool {
    if history.len() < 2 {
        return false;
    }
    let drifts: Vec<f64> = history.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let floor = 1e-10 * (1.0 + history.last().map_or(0.0, |h| h.1.abs()));
    drifts.windows(2).all(|d| d[1] < d[0] || d[1] <= floor) && drifts.iter().all(|d| d.is_finite())
}

/// Ratios of successive drifts; ≈ 4 for a second-order scheme.
pub fn refinement_ratios(history: &[(usize, f64)]) -> Vec<f64> {
    let drifts: Vec<f64> = history.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    drifts.windows(2).map(|d| d[0] / d[1]).collect()
}

/// Closed-form spectrum at λ = λ′ = 0: k² (k ≥ 1) twice from the outer
/// channels, and (j+2)² − 1 (j ≥ 0) from the middle one; lowest `count`.
pub fn decoupled_spectrum(count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let limit = (count + 2) as u64;
    for k in 1..=limit {
        out.push((k * k) as f64);
        out.push((k * k) as f64);
        out.push(((k + 1) * (k + 1) - 1) as f64);
    }
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    out
}
