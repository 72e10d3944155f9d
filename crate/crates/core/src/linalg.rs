//! Small linear-algebra kernels: symmetric tridiagonal eigenvalues by Sturm
//! bisection and banded LU with partial pivoting.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular at pivot {0}")]
    Singular(usize),
    #[error("eigenvalue index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (k, &d) in diag.iter().enumerate() {
        let e2 = if k == 0 { 0.0 } else { off[k - 1] * off[k - 1] };
        q = if k == 0 { d - x } else { d - x - e2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `index`-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> Result<f64, LinalgError> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    if index >= n {
        return Err(LinalgError::IndexOutOfRange { index, dim: n });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..n {
        let radius = if k > 0 { off[k - 1].abs() } else { 0.0 } + if k + 1 < n { off[k].abs() } else { 0.0 };
        lo = lo.min(diag[k] - radius);
        hi = hi.max(diag[k] + radius);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // Row-major band storage: row i holds columns i-lower ..= i+upper.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            return None;
        }
        Some(i * self.width() + (j + self.lower - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry (i, j); panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band"));
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let j0 = i.saturating_sub(self.lower);
            let j1 = (i + self.upper).min(self.n - 1);
            let mut s = 0.0;
            for (j, xj) in x.iter().enumerate().take(j1 + 1).skip(j0) {
                s += self.get(i, j) * xj;
            }
            *yi = s;
        }
    }

    /// LU factorization of `self − shift·I` with partial pivoting.
    pub fn shifted_lu(&self, shift: f64) -> Result<BandLu, LinalgError> {
        let n = self.n;
        let kl = self.lower;
        // Pivoting can push fill up to kl extra super-diagonals.
        let ku = self.upper + kl;
        let width = ku + 1;
        // u[i][c] stores entry (i, i + c) of the working matrix for c in 0..width,
        // with the strictly lower part kept separately in `l`.
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = vec![0.0; kl + width];
                // row[c] is column i - kl + c
                for j in i.saturating_sub(kl)..=(i + self.upper).min(n - 1) {
                    let mut v = self.get(i, j);
                    if i == j {
                        v -= shift;
                    }
                    row[j + kl - i] = v;
                }
                row
            })
            .collect();
        let mut perm = vec![0usize; n];
        let mut l = vec![vec![0.0; kl]; n];
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(shift.abs()).max(1.0);

        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = rows[k][kl].abs();
            for (i, row) in rows.iter().enumerate().take(last + 1).skip(k + 1) {
                let v = row[k + kl - i].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= f64::EPSILON * f64::EPSILON * scale {
                return Err(LinalgError::Singular(k));
            }
            perm[k] = piv;
            if piv != k {
                // Swap the active parts (columns k..k+ku) of rows k and piv.
                for c in 0..=ku {
                    let col = k + c;
                    if col >= n {
                        break;
                    }
                    let a = rows[k][col + kl - k];
                    let idx_p = col + kl - piv;
                    let b = if idx_p < rows[piv].len() { rows[piv][idx_p] } else { 0.0 };
                    rows[k][col + kl - k] = b;
                    if idx_p < rows[piv].len() {
                        rows[piv][idx_p] = a;
                    }
                }
            }
            let pivot = rows[k][kl];
            for i in (k + 1)..=last {
                let factor = rows[i][k + kl - i] / pivot;
                l[i][k + kl - i] = factor;
                rows[i][k + kl - i] = 0.0;
                if factor == 0.0 {
                    continue;
                }
                for c in 1..=ku {
                    let col = k + c;
                    if col >= n {
                        break;
                    }
                    let idx_i = col + kl - i;
                    if idx_i >= rows[i].len() {
                        break;
                    }
                    rows[i][idx_i] -= factor * rows[k][col + kl - k];
                }
            }
        }
        let u = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                (0..width)
                    .map(|c| if i + c < n { row[kl + c] } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(BandLu { n, kl, ku, u, l, perm })
    }
}

/// Factors produced by [`BandMatrix::shifted_lu`].
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    u: Vec<Vec<f64>>,
    // l[i][c]: multiplier eliminating column i - kl + c at step (i - kl + c)
    l: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl BandLu {
    /// Solves in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let kl = self.kl;
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                b.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            let bk = b[k];
            for (i, bi) in b.iter_mut().enumerate().take(last + 1).skip(k + 1) {
                *bi -= self.l[i][k + kl - i] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for c in 1..=self.ku {
                if i + c >= n {
                    break;
                }
                s -= self.u[i][c] * b[i + c];
            }
            b[i] = s / self.u[i][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tridiagonal_laplacian_eigenvalues() {
        // -u'' Dirichlet on n points: 2 - 2cos(kπ/(n+1))
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        for k in 0..5 {
            let exact = 2.0 - 2.0 * (((k + 1) as f64) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let got = tridiagonal_eigenvalue(&diag, &off, k).unwrap();
            assert!((got - exact).abs() < 1e-13, "{k}: {got} vs {exact}");
        }
        assert!(tridiagonal_eigenvalue(&diag, &off, n).is_err());
    }

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.add(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        for (seed, (kl, ku)) in [(1u64, (1, 1)), (2, (3, 3)), (3, (2, 4)), (4, (5, 2))] {
            let n = 40;
            let m = random_band(n, kl, ku, seed);
            let shift = 0.3;
            let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j) - if i == j { shift } else { 0.0 });
            let rhs: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
            let expected = dense.clone().lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
            let mut x = rhs.clone();
            m.shifted_lu(shift).unwrap().solve(&mut x);
            for k in 0..n {
                assert!((x[k] - expected[k]).abs() < 1e-9 * (1.0 + expected[k].abs()), "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0,1],[1,0]] needs a row swap
        let mut m = BandMatrix::zeros(2, 1, 1);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        let mut b = vec![2.0, 3.0];
        m.shifted_lu(0.0).unwrap().solve(&mut b);
        assert_eq!(b, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandMatrix::zeros(3, 1, 1);
        assert!(matches!(m.shifted_lu(0.0), Err(LinalgError::Singular(0))));
    }

    #[test]
    fn matvec_matches_dense() {
        let m = random_band(12, 2, 3, 9);
        let x: Vec<f64> = (0..12).map(|k| k as f64 - 5.0).collect();
        let mut y = vec![0.0; 12];
        m.matvec(&x, &mut y);
        for i in 0..12 {
            let s: f64 = (0..12).map(|j| m.get(i, j) * x[j]).sum();
            assert!((s - y[i]).abs() < 1e-12);
        }
    }
}
