//! Small dense row-major matrices over an arbitrary ring, with the handful of
//! factorizations the rest of the crate needs (genus is at most a few units,
//! so everything here is cubic-time textbook code).

use std::fmt::Debug;
use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Num> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| T::zero() - v.clone())
    }

    /// The `n x n` block whose top-left corner is at `(r, c)`.
    pub fn block(&self, r: usize, c: usize, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| self[(r + i, c + j)].clone())
    }

    /// Assembles `[[a, b], [c, d]]` from four square blocks of equal size.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.rows;
        Self::from_fn(2 * n, 2 * n, |i, j| {
            let src = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            src[(i % n, j % n)].clone()
        })
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Cofactor-expansion determinant; intended for the tiny matrices used
    /// with integer entries, where elimination would leave the ring.
    pub fn det_laplace(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => T::one(),
            1 => self[(0, 0)].clone(),
            2 => {
                self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            _ => {
                let mut acc = T::zero();
                for j in 0..n {
                    let minor = self.minor(0, j).det_laplace();
                    let term = self[(0, j)].clone() * minor;
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.rows;
        Self::from_fn(n - 1, n - 1, |i, j| {
            let ii = if i < row { i } else { i + 1 };
            let jj = if j < col { j } else { j + 1 };
            self[(ii, jj)].clone()
        })
    }

    /// Classical adjugate, `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        Self::from_fn(n, n, |i, j| {
            let m = self.minor(j, i).det_laplace();
            if (i + j) % 2 == 0 {
                m
            } else {
                T::zero() - m
            }
        })
    }
}

impl<T: Scalar> Mat<T> {
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest entry of `|M - M^t|`.
    pub fn asymmetry(&self) -> T {
        self.sub(&self.transpose()).max_abs()
    }

    pub fn cast<U: Real>(&self) -> Mat<U> {
        self.map(|v| U::lit(v.to_f64_lossy()))
    }
}

impl<T: Real> Mat<T> {
    pub fn symmetrize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]) * half)
    }

    /// Cholesky factor `L` with `L L^t = self`, or `None` when the matrix is
    /// not (numerically) positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.rows;
        let mut a = self.symmetrize();
        for _sweep in 0..64 {
            let mut off = T::zero();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off + a[(i, j)] * a[(i, j)];
                    }
                }
            }
            if off <= T::epsilon() * T::epsilon() * (T::one() + a.max_abs() * a.max_abs()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)] == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Scalars supporting Gaussian elimination. `pivot_weight` ranks pivot
/// candidates; exact types only need it to be nonzero for nonzero values.
pub trait Field: Clone + Num + Debug {
    fn pivot_weight(&self) -> f64;
}

impl Field for f64 {
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }
}

impl Field for f32 {
    fn pivot_weight(&self) -> f64 {
        self.abs() as f64
    }
}

impl Field for BigRational {
    fn pivot_weight(&self) -> f64 {
        nonzero_weight(self.is_zero(), self.abs().to_f64_lossy())
    }
}

impl<T: Scalar> Field for Complex<T> {
    fn pivot_weight(&self) -> f64 {
        nonzero_weight(self.is_zero(), self.norm_sqr().to_f64_lossy())
    }
}

// Exact nonzero values must never rank as zero after rounding to f64.
fn nonzero_weight(is_zero: bool, w: f64) -> f64 {
    if is_zero {
        0.0
    } else {
        w.max(f64::MIN_POSITIVE)
    }
}

impl<T: Field> Mat<T> {
    /// Determinant by elimination with partial pivoting.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = pivot_row(&a, col) else {
                return T::zero();
            };
            if p != col {
                swap_rows(&mut a, p, col);
                det = T::zero() - det;
            }
            let piv = a[(col, col)].clone();
            det = det * piv.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)].clone() * f.clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = pivot_row(&a, col)?;
            if p != col {
                swap_rows(&mut a, p, col);
                swap_rows(&mut inv, p, col);
            }
            let piv = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / piv.clone();
                inv[(col, c)] = inv[(col, c)].clone() / piv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let va = a[(col, c)].clone() * f.clone();
                    a[(r, c)] = a[(r, c)].clone() - va;
                    let vi = inv[(col, c)].clone() * f.clone();
                    inv[(r, c)] = inv[(r, c)].clone() - vi;
                }
            }
        }
        Some(inv)
    }
}

fn pivot_row<T: Field>(a: &Mat<T>, col: usize) -> Option<usize> {
    let mut best = None;
    let mut best_w = 0.0;
    for r in col..a.rows() {
        let w = a[(r, col)].pivot_weight();
        if w > best_w {
            best_w = w;
            best = Some(r);
        }
    }
    best
}

fn swap_rows<T>(a: &mut Mat<T>, r1: usize, r2: usize) {
    if r1 == r2 {
        return;
    }
    let cols = a.cols;
    for c in 0..cols {
        a.data.swap(r1 * cols + c, r2 * cols + c);
    }
}

pub type CMat<T> = Mat<Complex<T>>;

/// `X + iY` from real and imaginary parts.
pub fn complexify<T: Clone + Num>(re: &Mat<T>, im: &Mat<T>) -> CMat<T> {
    Mat::from_fn(re.rows(), re.cols(), |i, j| {
        Complex::new(re[(i, j)].clone(), im[(i, j)].clone())
    })
}

pub fn real_part<T: Clone + Num>(m: &CMat<T>) -> Mat<T> {
    m.map(|z| z.re.clone())
}

pub fn imag_part<T: Clone + Num>(m: &CMat<T>) -> Mat<T> {
    m.map(|z| z.im.clone())
}

pub fn conj<T: Clone + Num + std::ops::Neg<Output = T>>(m: &CMat<T>) -> CMat<T> {
    m.map(|z| z.conj())
}

/// Embeds a real matrix as a complex one.
pub fn lift<T: Clone + Num>(m: &Mat<T>) -> CMat<T> {
    m.map(|v| Complex::new(v.clone(), T::zero()))
}

/// Largest complex modulus among the entries.
pub fn max_modulus<T: Real>(m: &CMat<T>) -> T {
    m.iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_agree() {
        let m = Mat::from_vec(3, 3, vec![4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0]);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.sub(&Mat::identity(3)).max_abs() < 1e-14);
        assert!((m.det() - m.det_laplace()).abs() < 1e-12);
    }

    #[test]
    fn adjugate_of_unimodular_integer_matrix() {
        let u: Mat<i64> = Mat::from_vec(3, 3, vec![1, 2, 0, 0, 1, 3, 1, 0, 1]);
        let det = u.det_laplace();
        assert_eq!(det, 7);
        let prod = u.adjugate().mul(&u);
        assert_eq!(prod, Mat::identity(3).scale(&7));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let y = Mat::from_vec(2, 2, vec![1.0, 0.0, 0.0, -1.0]);
        assert!(y.cholesky().is_none());
        let y = Mat::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]);
        let l = y.cholesky().unwrap();
        assert!(l.mul(&l.transpose()).sub(&y).max_abs() < 1e-15);
    }

    #[test]
    fn jacobi_eigenvalues() {
        let y = Mat::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]);
        let ev = y.symmetric_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let y = Mat::from_vec(3, 3, vec![1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 5.0]);
        assert_eq!(y.symmetric_eigenvalues(), vec![-2.0, 1.0, 5.0]);
    }

    #[test]
    fn exact_complex_inverse() {
        use num_bigint::BigInt;
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let m: CMat<BigRational> = Mat::from_vec(
            2,
            2,
            vec![
                Complex::new(q(1, 2), q(1, 3)),
                Complex::new(q(0, 1), q(1, 1)),
                Complex::new(q(2, 1), q(0, 1)),
                Complex::new(q(1, 1), q(-1, 5)),
            ],
        );
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
    }
}
