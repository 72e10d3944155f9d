//! Exact arithmetic over the Gaussian rationals extended by √2.
//!
//! Every entry of the cyclic Duffin–Kemmer matrices lives in ℚ(i, √2): the
//! only irrational factor is 1/√2 = √2/2. An element is stored as
//! `(a + b√2) + i(c + d√2)` with rational `a, b, c, d`, which is closed under
//! the ring operations, so matrix identities can be checked with zero
//! residual.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

/// A real number `rational + irrational·√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub rational: Rational64,
    pub irrational: Rational64,
}

impl QSqrt2 {
    pub const fn new(rational: Rational64, irrational: Rational64) -> Self {
        Self {
            rational,
            irrational,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(Rational64::from_integer(n), Rational64::zero())
    }

    /// 1/√2 = √2/2.
    pub fn inv_sqrt2() -> Self {
        Self::new(Rational64::zero(), Rational64::new(1, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        let s = self.irrational.to_f64().unwrap_or(f64::NAN);
        r + s * std::f64::consts::SQRT_2
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rational + rhs.rational, self.irrational + rhs.irrational)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rational - rhs.rational, self.irrational - rhs.irrational)
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.irrational)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = Rational64::from_integer(2);
        Self::new(
            self.rational * rhs.rational + two * self.irrational * rhs.irrational,
            self.rational * rhs.irrational + self.irrational * rhs.rational,
        )
    }
}

/// A complex number with both parts in ℚ(√2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Exact {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Exact {
    pub const fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(QSqrt2::default(), QSqrt2::from_integer(1))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(QSqrt2::from_integer(n), QSqrt2::default())
    }

    pub fn inv_sqrt2() -> Self {
        Self::new(QSqrt2::inv_sqrt2(), QSqrt2::default())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for Exact {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Exact {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for Exact {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for Exact {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |q: &QSqrt2| -> String {
            match (q.rational.is_zero(), q.irrational.is_zero()) {
                (true, true) => "0".to_string(),
                (false, true) => q.rational.to_string(),
                (true, false) => format!("{}√2", q.irrational),
                (false, false) => format!("({}+{}√2)", q.rational, q.irrational),
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", part(&self.re)),
            (true, false) => write!(f, "{}i", part(&self.im)),
            (false, false) => write!(f, "{}+{}i", part(&self.re), part(&self.im)),
        }
    }
}

/// Dense row-major matrix with [`Exact`] entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Exact>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Exact::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Exact::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[Exact]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn diagonal(values: &[Exact]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (k, v) in values.iter().enumerate() {
            m[(k, k)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Exact::is_zero)
    }

    pub fn scale(&self, s: Exact) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| s * *v).collect(),
        }
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn submatrix(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(row + i, col + j)];
            }
        }
        out
    }

    pub fn set_submatrix(&mut self, row: usize, col: usize, block: &ExactMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    /// Max-modulus entry after conversion to floating point.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.to_complex().norm())
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_complex()).collect())
            .collect()
    }

    /// Entries that differ from `other`, as `(row, col)` pairs.
    pub fn mismatches(&self, other: &ExactMatrix) -> Vec<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != other[(i, j)] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Exact;
    fn index(&self, (i, j): (usize, usize)) -> &Exact {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Exact {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: Self) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<'a> Sub for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: Self) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<'a> Neg for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        self.scale(-Exact::one())
    }
}

impl<'a> Mul for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: Self) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        Self::from_integer(1)
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        QSqrt2::is_zero(self)
    }
}
