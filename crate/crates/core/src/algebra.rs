//! Cyclic representation of the ten-dimensional Duffin–Kemmer algebra.
//!
//! The 10-component spin-1 field is split into blocks of sizes 1–3–3–3
//! (scalar, vector, "electric", "magnetic"). Block indices used below are
//! 0-based, so the 1-based block (1,3) is `block(0, 2)`.

use serde::Serialize;

use crate::exact::{Exact, ExactMatrix};

/// Offsets and sizes of the 1–3–3–3 block layout.
pub const BLOCK_OFFSETS: [usize; 4] = [0, 1, 4, 7];
pub const BLOCK_SIZES: [usize; 4] = [1, 3, 3, 3];
pub const DIM: usize = 10;

/// Minkowski metric η = diag(+1, −1, −1, −1).
pub const ETA: [i64; 4] = [1, -1, -1, -1];

pub fn eta(a: usize, b: usize) -> i64 {
    if a == b {
        ETA[a]
    } else {
        0
    }
}

/// Copy of block `(bi, bj)` of a 10×10 matrix.
pub fn block(m: &ExactMatrix, bi: usize, bj: usize) -> ExactMatrix {
    m.submatrix(BLOCK_OFFSETS[bi], BLOCK_OFFSETS[bj], BLOCK_SIZES[bi], BLOCK_SIZES[bj])
}

fn set_block(m: &mut ExactMatrix, bi: usize, bj: usize, value: &ExactMatrix) {
    assert_eq!((value.rows(), value.cols()), (BLOCK_SIZES[bi], BLOCK_SIZES[bj]));
    m.set_submatrix(BLOCK_OFFSETS[bi], BLOCK_OFFSETS[bj], value);
}

/// The β-matrices together with the building blocks they are assembled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DkpMatrixSet {
    /// β⁰, β¹, β², β³.
    pub beta: [ExactMatrix; 4],
    /// Block-diagonal spin matrices S₁, S₂, S₃ = diag(0, τᵢ, τᵢ, τᵢ).
    pub spin: [ExactMatrix; 3],
    /// Row vectors e₁, e₂, e₃ (1×3).
    pub e: [ExactMatrix; 3],
    /// τ₁, τ₂, τ₃ (3×3).
    pub tau: [ExactMatrix; 3],
}

impl DkpMatrixSet {
    pub fn beta0(&self) -> &ExactMatrix {
        &self.beta[0]
    }
}

pub fn build_dkp_set() -> DkpMatrixSet {
    let z = Exact::zero();
    let one = Exact::one();
    let i = Exact::i();
    let r = Exact::inv_sqrt2();

    let e = [
        ExactMatrix::from_rows(&[&[-i * r, z, i * r]]),
        ExactMatrix::from_rows(&[&[r, z, r]]),
        ExactMatrix::from_rows(&[&[z, i, z]]),
    ];
    let tau = [
        ExactMatrix::from_rows(&[&[z, r, z], &[r, z, r], &[z, r, z]]),
        ExactMatrix::from_rows(&[&[z, -i * r, z], &[i * r, z, -i * r], &[z, i * r, z]]),
        ExactMatrix::diagonal(&[one, z, -one]),
    ];

    let mut beta0 = ExactMatrix::zeros(DIM, DIM);
    let id3 = ExactMatrix::identity(3);
    set_block(&mut beta0, 1, 2, &id3.scale(i));
    set_block(&mut beta0, 2, 1, &id3.scale(-i));

    let spatial = |k: usize| {
        let mut b = ExactMatrix::zeros(DIM, DIM);
        set_block(&mut b, 0, 2, &e[k]);
        set_block(&mut b, 1, 3, &tau[k]);
        set_block(&mut b, 2, 0, &-&e[k].adjoint());
        set_block(&mut b, 3, 1, &-&tau[k]);
        b
    };
    let beta = [beta0, spatial(0), spatial(1), spatial(2)];

    let spin = [0, 1, 2].map(|k| {
        let mut s = ExactMatrix::zeros(DIM, DIM);
        for blk in 1..4 {
            set_block(&mut s, blk, blk, &tau[k]);
        }
        s
    });

    DkpMatrixSet { beta, spin, e, tau }
}

/// Lorentz generators Jᵃᵇ = βᵃβᵇ − βᵇβᵃ for the spatial pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub j12: ExactMatrix,
    pub j13: ExactMatrix,
    pub j23: ExactMatrix,
}

pub fn commutator(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    &(a * b) - &(b * a)
}

/// Jᵃᵇ for arbitrary indices a, b ∈ {0, 1, 2, 3}.
pub fn generator(set: &DkpMatrixSet, a: usize, b: usize) -> ExactMatrix {
    commutator(&set.beta[a], &set.beta[b])
}

pub fn build_generators(set: &DkpMatrixSet) -> GeneratorSet {
    GeneratorSet {
        j12: generator(set, 1, 2),
        j13: generator(set, 1, 3),
        j23: generator(set, 2, 3),
    }
}

/// Residual report of the trilinear identity
/// βᵃβᵇβᶜ + βᶜβᵇβᵃ = ηᵃᵇβᶜ + ηᶜᵇβᵃ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrilinearReport {
    pub triples_checked: usize,
    /// Largest floating-point modulus of any residual entry.
    pub max_residual: f64,
    /// Index triples whose exact residual is nonzero.
    pub failures: Vec<(usize, usize, usize)>,
}

impl TrilinearReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn trilinear_residual(set: &DkpMatrixSet, a: usize, b: usize, c: usize) -> ExactMatrix {
    let bt = &set.beta;
    let lhs = &(&(&bt[a] * &bt[b]) * &bt[c]) + &(&(&bt[c] * &bt[b]) * &bt[a]);
    let rhs = &bt[c].scale(Exact::from_integer(eta(a, b)))
        + &bt[a].scale(Exact::from_integer(eta(c, b)));
    &lhs - &rhs
}

pub fn check_dkp_algebra(set: &DkpMatrixSet) -> TrilinearReport {
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut triples_checked = 0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let res = trilinear_residual(set, a, b, c);
                triples_checked += 1;
                max_residual = max_residual.max(res.max_abs());
                if !res.is_zero() {
                    failures.push((a, b, c));
                }
            }
        }
    }
    TrilinearReport {
        triples_checked,
        max_residual,
        failures,
    }
}

/// β¹J¹³ + β²J²³, the matrix multiplying sin z in the separated equation.
pub fn coupling_block(set: &DkpMatrixSet) -> ExactMatrix {
    let g = build_generators(set);
    &(&set.beta[1] * &g.j13) + &(&set.beta[2] * &g.j23)
}

/// Closed block form of β¹J¹³ + β²J²³: −2e₃ in block (1,3), −τ₃ in
/// block (2,4), +τ₃ in block (4,2), zero elsewhere (1-based block labels).
pub fn reference_coupling_block(set: &DkpMatrixSet) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(DIM, DIM);
    set_block(&mut m, 0, 2, &set.e[2].scale(Exact::from_integer(-2)));
    set_block(&mut m, 1, 3, &-&set.tau[2]);
    set_block(&mut m, 3, 1, &set.tau[2]);
    m
}

/// Outcome of one exact identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    /// Max-norm of the residual after conversion to floating point.
    pub residual: f64,
    pub detail: String,
}

impl IdentityCheck {
    fn from_difference(name: &str, diff: &ExactMatrix) -> Self {
        let passed = diff.is_zero();
        let detail = if passed {
            "exact".to_string()
        } else {
            let nonzero = diff.mismatches(&ExactMatrix::zeros(diff.rows(), diff.cols()));
            format!("{} nonzero entries, first at {:?}", nonzero.len(), nonzero[0])
        };
        Self {
            name: name.to_string(),
            passed,
            residual: diff.max_abs(),
            detail,
        }
    }
}

/// Runs every identity the separated equations rely on.
pub fn algebra_checks(set: &DkpMatrixSet) -> Vec<IdentityCheck> {
    let g = build_generators(set);
    let i = Exact::i();
    let mut checks = vec![
        IdentityCheck::from_difference("J12 = -i S3", &(&g.j12 - &set.spin[2].scale(-i))),
        IdentityCheck::from_difference("J13 = +i S2", &(&g.j13 - &set.spin[1].scale(i))),
        IdentityCheck::from_difference("J23 = -i S1", &(&g.j23 - &set.spin[0].scale(-i))),
        IdentityCheck::from_difference(
            "beta1 J13 + beta2 J23 = reference block",
            &(&coupling_block(set) - &reference_coupling_block(set)),
        ),
    ];

    let s3 = &set.spin[2];
    checks.push(IdentityCheck::from_difference(
        "S3^3 = S3",
        &(&(&(s3 * s3) * s3) - s3),
    ));

    let mut antisym = ExactMatrix::zeros(DIM, DIM);
    let mut worst = 0.0f64;
    let mut ok = true;
    for a in 0..4 {
        for b in 0..4 {
            let d = &generator(set, a, b) + &generator(set, b, a);
            worst = worst.max(d.max_abs());
            if !d.is_zero() {
                ok = false;
                antisym = d;
            }
        }
    }
    let mut anti = IdentityCheck::from_difference("J^ab = -J^ba", &antisym);
    anti.passed = ok;
    anti.residual = worst;
    checks.push(anti);

    let mut diag_ok = true;
    for b in &set.beta {
        for k in 0..4 {
            if !block(b, k, k).is_zero() {
                diag_ok = false;
            }
        }
    }
    checks.push(IdentityCheck {
        name: "beta^a diagonal blocks vanish".to_string(),
        passed: diag_ok,
        residual: if diag_ok { 0.0 } else { 1.0 },
        detail: if diag_ok { "exact" } else { "nonzero diagonal block" }.to_string(),
    });

    let trilinear = check_dkp_algebra(set);
    checks.push(IdentityCheck {
        name: "DKP trilinear identity (64 triples)".to_string(),
        passed: trilinear.passed(),
        residual: trilinear.max_residual,
        detail: if trilinear.passed() {
            format!("exact on {} triples", trilinear.triples_checked)
        } else {
            format!("failing triples {:?}", trilinear.failures)
        },
    });
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64) -> Exact {
        Exact::from_integer(n)
    }

    #[test]
    fn beta3_carries_e3_in_block_1_3() {
        let set = build_dkp_set();
        let b = block(&set.beta[3], 0, 2);
        assert_eq!(b, ExactMatrix::from_rows(&[&[ex(0), Exact::i(), ex(0)]]));
    }

    #[test]
    fn tau3_is_s3() {
        let set = build_dkp_set();
        assert_eq!(set.tau[2], ExactMatrix::diagonal(&[ex(1), ex(0), ex(-1)]));
    }

    #[test]
    fn every_beta_has_zero_diagonal_blocks() {
        let set = build_dkp_set();
        for b in &set.beta {
            for k in 0..4 {
                assert!(block(b, k, k).is_zero());
            }
        }
    }

    #[test]
    fn beta0_only_couples_vector_and_electric_blocks() {
        let set = build_dkp_set();
        let i = Exact::i();
        for bi in 0..4 {
            for bj in 0..4 {
                let blk = block(set.beta0(), bi, bj);
                match (bi, bj) {
                    (1, 2) => assert_eq!(blk, ExactMatrix::identity(3).scale(i)),
                    (2, 1) => assert_eq!(blk, ExactMatrix::identity(3).scale(-i)),
                    _ => assert!(blk.is_zero()),
                }
            }
        }
    }

    #[test]
    fn generators_match_spin_blocks() {
        let set = build_dkp_set();
        let g = build_generators(&set);
        let i = Exact::i();
        assert_eq!(g.j12, set.spin[2].scale(-i));
        assert_eq!(g.j13, set.spin[1].scale(i));
        assert_eq!(g.j23, set.spin[0].scale(-i));
    }

    #[test]
    fn trilinear_000_gives_twice_beta0() {
        let set = build_dkp_set();
        let b0 = &set.beta[0];
        let lhs = &(&(b0 * b0) * b0) + &(&(b0 * b0) * b0);
        assert_eq!(lhs, b0.scale(ex(2)));
    }

    #[test]
    fn trilinear_123_vanishes() {
        let set = build_dkp_set();
        let b = &set.beta;
        let lhs = &(&(&b[1] * &b[2]) * &b[3]) + &(&(&b[3] * &b[2]) * &b[1]);
        assert!(lhs.is_zero());
    }

    #[test]
    fn trilinear_mixed_010_has_zero_right_side() {
        assert_eq!(eta(0, 1), 0);
        let set = build_dkp_set();
        let b = &set.beta;
        let lhs = &(&(&b[0] * &b[1]) * &b[0]) + &(&(&b[0] * &b[1]) * &b[0]);
        assert!(lhs.is_zero());
        assert!(trilinear_residual(&set, 0, 1, 0).is_zero());
    }

    #[test]
    fn all_64_triples_hold_exactly() {
        let report = check_dkp_algebra(&build_dkp_set());
        assert_eq!(report.triples_checked, 64);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn coupling_block_matches_block_form() {
        let set = build_dkp_set();
        let c = coupling_block(&set);
        assert_eq!(block(&c, 0, 2), set.e[2].scale(ex(-2)));
        assert_eq!(block(&c, 3, 1), set.tau[2]);
        assert_eq!(block(&c, 1, 3), set.tau[2].scale(ex(-1)));
        for k in 0..4 {
            assert!(block(&c, k, k).is_zero());
        }
        assert_eq!(c, reference_coupling_block(&set));
    }

    #[test]
    fn s3_is_idempotent_in_cube() {
        let s3 = &build_dkp_set().spin[2];
        assert_eq!(&(s3 * s3) * s3, *s3);
    }

    #[test]
    fn generators_are_antisymmetric() {
        let set = build_dkp_set();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(generator(&set, a, b), -&generator(&set, b, a));
            }
        }
    }

    #[test]
    fn float_conversion_keeps_identities_to_machine_precision() {
        let set = build_dkp_set();
        let g = build_generators(&set);
        let j12 = g.j12.to_complex();
        let s3 = set.spin[2].to_complex();
        for (row_j, row_s) in j12.iter().zip(&s3) {
            for (a, b) in row_j.iter().zip(row_s) {
                let expected = b * num_complex::Complex64::new(0.0, -1.0);
                assert!((a - expected).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn broken_matrix_is_reported_with_its_triple() {
        let mut set = build_dkp_set();
        set.beta[2][(0, 4)] = Exact::from_integer(3);
        let report = check_dkp_algebra(&set);
        assert!(!report.passed());
        assert!(report.failures.contains(&(2, 2, 2)));
        assert!(report.max_residual > 0.0);
    }

    #[test]
    fn all_named_checks_pass() {
        for check in algebra_checks(&build_dkp_set()) {
            assert!(check.passed, "{} failed: {}", check.name, check.detail);
            assert_eq!(check.residual, 0.0);
        }
    }
}
