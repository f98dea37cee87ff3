//! The integral (and real) symplectic group `Sp_2g`.
//!
//! Matrices are laid out as `[[A, B], [C, D]]` with `g x g` blocks and
//! preserve the alternating form `J = [[0, I], [-I, 0]]`, i.e. `M J M^t = J`.
//! Inverses are computed from the symplectic relation
//! `M^{-1} = -J M^t J = [[D^t, -B^t], [-C^t, A^t]]`, never by elimination.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// The standard alternating matrix of degree `2g`.
pub fn standard_alternating<T: Scalar>(g: usize) -> Mat<T> {
    Mat::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            T::one()
        } else if i == j + g {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// `max |M J M^t - J|`.
pub fn symplectic_residual<T: Scalar>(m: &Mat<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Malformed(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 || m.rows() % 2 != 0 {
        return Err(Error::Malformed(format!(
            "dimension {} is not a positive even number",
            m.rows()
        )));
    }
    let j = standard_alternating::<T>(m.rows() / 2);
    Ok(m.mul(&j).mul(&m.transpose()).sub(&j).max_abs())
}

/// `true` iff `max |M J M^t - J| <= tol`.
pub fn is_symplectic<T: Scalar>(m: &Mat<T>, tol: &T) -> Result<bool> {
    Ok(symplectic_residual(m)? <= *tol)
}

/// An element of `Sp_2g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix<T> {
    g: usize,
    entries: Mat<T>,
}

/// `h(M) = max(1, |m_ij|)`; coincides with the multiplicative Weil height of
/// an integral matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd)]
pub struct MatrixHeight<T>(pub T);

impl<T: Scalar> MatrixHeight<T> {
    pub fn value(&self) -> &T {
        &self.0
    }

    pub fn ln(&self) -> f64 {
        self.0.ln_abs()
    }
}

impl<T: fmt::Display> fmt::Display for MatrixHeight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<T: Scalar> SymplecticMatrix<T> {
    /// Validates with the scalar's default tolerance (zero for exact types).
    pub fn new(entries: Mat<T>) -> Result<Self> {
        Self::with_tolerance(entries, &T::default_tol())
    }

    pub fn with_tolerance(entries: Mat<T>, tol: &T) -> Result<Self> {
        let residual = symplectic_residual(&entries)?;
        if residual > *tol {
            return Err(Error::NotSymplectic {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self {
            g: entries.rows() / 2,
            entries,
        })
    }

    /// Skips validation; callers guarantee the relation holds by construction.
    pub(crate) fn new_unchecked(entries: Mat<T>) -> Self {
        debug_assert!(entries.rows() % 2 == 0);
        Self {
            g: entries.rows() / 2,
            entries,
        }
    }

    pub fn from_blocks(a: &Mat<T>, b: &Mat<T>, c: &Mat<T>, d: &Mat<T>) -> Result<Self> {
        Self::new(Mat::from_blocks(a, b, c, d))
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &Mat<T> {
        &self.entries
    }

    pub fn a(&self) -> Mat<T> {
        self.entries.block(0, 0, self.g)
    }

    pub fn b(&self) -> Mat<T> {
        self.entries.block(0, self.g, self.g)
    }

    pub fn c(&self) -> Mat<T> {
        self.entries.block(self.g, 0, self.g)
    }

    pub fn d(&self) -> Mat<T> {
        self.entries.block(self.g, self.g, self.g)
    }

    pub fn identity(g: usize) -> Self {
        Self::new_unchecked(Mat::identity(2 * g))
    }

    /// The standard alternating matrix `J`, itself symplectic.
    pub fn j(g: usize) -> Self {
        Self::new_unchecked(standard_alternating(g))
    }

    /// `-I`, acting trivially on the upper half-space.
    pub fn minus_identity(g: usize) -> Self {
        Self::new_unchecked(Mat::identity(2 * g).neg())
    }

    /// Translation `T_S = [[I, S], [0, I]]` for symmetric `S`.
    pub fn translation(s: &Mat<T>) -> Result<Self> {
        if !s.is_square() || s.asymmetry() > T::default_tol() {
            return Err(Error::Malformed("translation block must be symmetric".into()));
        }
        let g = s.rows();
        Ok(Self::new_unchecked(Mat::from_blocks(
            &Mat::identity(g),
            s,
            &Mat::zeros(g, g),
            &Mat::identity(g),
        )))
    }

    /// `diag(U, U^{-t})`, acting by `Z -> U Z U^t`.
    pub fn gl_embedding(u: &Mat<T>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::Malformed("GL block must be square".into()));
        }
        let g = u.rows();
        let det = u.det_laplace();
        if det.is_zero() {
            return Err(Error::Malformed("GL block is singular".into()));
        }
        let inv = u.adjugate().map(|v| v.clone() / det.clone());
        if inv.mul(u).sub(&Mat::identity(g)).max_abs() > T::default_tol() {
            return Err(Error::Malformed(
                "GL block is not invertible over the scalar ring".into(),
            ));
        }
        let zero = Mat::zeros(g, g);
        Ok(Self::new_unchecked(Mat::from_blocks(
            u,
            &zero,
            &zero,
            &inv.transpose(),
        )))
    }

    /// Involution exchanging `z_ii` with `-1/z_ii`-type coordinates on the
    /// index set `subset` (the full set gives `J`).
    pub fn partial_involution(g: usize, subset: &[usize]) -> Self {
        let on = |i: usize| subset.contains(&i);
        let a = Mat::from_fn(g, g, |i, j| {
            if i == j && !on(i) {
                T::one()
            } else {
                T::zero()
            }
        });
        let b = Mat::from_fn(g, g, |i, j| if i == j && on(i) { T::one() } else { T::zero() });
        let c = b.neg();
        Self::new_unchecked(Mat::from_blocks(&a, &b, &c, &a))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.g != rhs.g {
            return Err(Error::GenusMismatch {
                left: self.g,
                right: rhs.g,
            });
        }
        Ok(Self::new_unchecked(self.entries.mul(&rhs.entries)))
    }

    /// Exact inverse `[[D^t, -B^t], [-C^t, A^t]]`.
    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        Self::new_unchecked(Mat::from_blocks(
            &d.transpose(),
            &b.transpose().neg(),
            &c.transpose().neg(),
            &a.transpose(),
        ))
    }

    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.entries.transpose())
    }

    pub fn neg(&self) -> Self {
        Self::new_unchecked(self.entries.neg())
    }

    pub fn height(&self) -> MatrixHeight<T> {
        let m = self.entries.max_abs();
        MatrixHeight(if m > T::one() { m } else { T::one() })
    }

    pub fn residual(&self) -> T {
        symplectic_residual(&self.entries).expect("shape validated at construction")
    }

    pub fn is_identity(&self) -> bool {
        self.entries == Mat::identity(2 * self.g)
    }

    /// Converts entries to another scalar type (e.g. exact integers to `f64`).
    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymplecticMatrix<U> {
        SymplecticMatrix::new_unchecked(self.entries.map(f))
    }
}

/// Unit symmetric matrix `E_ij + E_ji` (or `E_ii`).
pub fn symmetric_unit<T: Scalar>(g: usize, i: usize, j: usize) -> Mat<T> {
    Mat::from_fn(g, g, |r, c| {
        if (r, c) == (i, j) || (r, c) == (j, i) {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Generating set of `GL_g(Z)` used by [`generators`].
///
/// For `g = 1` this is `{-1}`. For `g >= 2`: the transvection `I + E_12`,
/// the transposition of the first two coordinates, the cyclic shift (only
/// when `g >= 3`) and `diag(-1, 1, ..., 1)`.
pub fn gl_generators<T: Scalar>(g: usize) -> Vec<Mat<T>> {
    if g == 1 {
        return vec![Mat::identity(1).neg()];
    }
    let mut out = Vec::new();
    let mut transvection = Mat::identity(g);
    transvection[(0, 1)] = T::one();
    out.push(transvection);
    out.push(Mat::from_fn(g, g, |i, j| {
        let p = match i {
            0 => 1,
            1 => 0,
            k => k,
        };
        if j == p {
            T::one()
        } else {
            T::zero()
        }
    }));
    if g >= 3 {
        out.push(Mat::from_fn(g, g, |i, j| {
            if j == (i + 1) % g {
                T::one()
            } else {
                T::zero()
            }
        }));
    }
    let mut flip = Mat::identity(g);
    flip[(0, 0)] = -T::one();
    out.push(flip);
    out
}

/// Canonical generating set of `Sp_2g(Z)`: `J` first, then the elementary
/// symmetric translations `T_{E_ij + E_ji}` for `i <= j` in row-major order,
/// then `diag(U, U^{-t})` for `U` in [`gl_generators`].
pub fn generators<T: Scalar>(g: usize) -> Vec<SymplecticMatrix<T>> {
    assert!(g >= 1, "genus must be positive");
    let mut out = vec![SymplecticMatrix::j(g)];
    for i in 0..g {
        for j in i..g {
            out.push(
                SymplecticMatrix::translation(&symmetric_unit(g, i, j))
                    .expect("unit matrices are symmetric"),
            );
        }
    }
    for u in gl_generators::<T>(g) {
        out.push(SymplecticMatrix::gl_embedding(&u).expect("generators are unimodular"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use std::collections::{HashSet, VecDeque};

    fn int(g: usize, v: &[i64]) -> Mat<BigInt> {
        Mat::from_vec(2 * g, 2 * g, v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn is_symplectic_examples() {
        let zero = BigInt::from(0);
        assert!(is_symplectic(&standard_alternating::<BigInt>(1), &zero).unwrap());
        for g in 1..=3 {
            assert!(is_symplectic(&Mat::<BigInt>::identity(2 * g), &zero).unwrap());
        }
        assert!(is_symplectic(&int(1, &[1, 1, 1, 2]), &zero).unwrap());
        assert!(!is_symplectic(&int(1, &[1, 1, 1, 3]), &zero).unwrap());
    }

    #[test]
    fn odd_dimension_is_malformed() {
        let m: Mat<i64> = Mat::identity(3);
        assert!(matches!(is_symplectic(&m, &0), Err(Error::Malformed(_))));
        let m: Mat<i64> = Mat::zeros(2, 4);
        assert!(matches!(is_symplectic(&m, &0), Err(Error::Malformed(_))));
    }

    #[test]
    fn multiplication_examples() {
        let m = SymplecticMatrix::new(int(1, &[1, 1, 1, 2])).unwrap();
        assert_eq!(m.mul(&SymplecticMatrix::identity(1)).unwrap(), m);
        for g in 1..=3 {
            let j = SymplecticMatrix::<BigInt>::j(g);
            assert_eq!(j.mul(&j).unwrap(), SymplecticMatrix::minus_identity(g));
        }
        let s1 = Mat::from_vec(2, 2, vec![1i64, 2, 2, -1]);
        let s2 = Mat::from_vec(2, 2, vec![0i64, -5, -5, 3]);
        let t1 = SymplecticMatrix::translation(&s1).unwrap();
        let t2 = SymplecticMatrix::translation(&s2).unwrap();
        assert_eq!(
            t1.mul(&t2).unwrap(),
            SymplecticMatrix::translation(&s1.add(&s2)).unwrap()
        );
        let err = t1.mul(&SymplecticMatrix::identity(1)).unwrap_err();
        assert!(matches!(err, Error::GenusMismatch { left: 2, right: 1 }));
    }

    #[test]
    fn inverse_examples() {
        let s = Mat::from_vec(2, 2, vec![3i64, 1, 1, 0]);
        let t = SymplecticMatrix::translation(&s).unwrap();
        assert_eq!(t.inverse(), SymplecticMatrix::translation(&s.neg()).unwrap());
        let j = SymplecticMatrix::<i64>::j(2);
        assert_eq!(j.inverse(), j.neg());
        let m = SymplecticMatrix::new(int(1, &[1, 1, 1, 2])).unwrap();
        assert_eq!(m.inverse().entries(), &int(1, &[2, -1, -1, 1]));
        assert!(m.mul(&m.inverse()).unwrap().is_identity());
    }

    #[test]
    fn height_examples() {
        assert_eq!(SymplecticMatrix::<BigInt>::j(2).height().0, BigInt::from(1));
        let s = Mat::<BigInt>::identity(2).scale(&BigInt::from(3));
        assert_eq!(
            SymplecticMatrix::translation(&s).unwrap().height().0,
            BigInt::from(3)
        );
        let m = SymplecticMatrix::new(int(1, &[2, -1, -1, 1])).unwrap();
        assert_eq!(m.height().0, BigInt::from(2));
        assert_eq!(SymplecticMatrix::<f64>::identity(2).height().0, 1.0);
    }

    #[test]
    fn generators_g1_match_canonical_list() {
        let gens = generators::<i64>(1);
        let expected = [vec![0, 1, -1, 0], vec![1, 1, 0, 1], vec![-1, 0, 0, -1]];
        assert_eq!(gens.len(), 3);
        for (m, e) in gens.iter().zip(expected.iter()) {
            assert_eq!(m.entries().as_slice(), e.as_slice());
        }
    }

    #[test]
    fn generators_are_symplectic_with_unit_height() {
        for g in 1..=4 {
            for m in generators::<BigInt>(g) {
                assert!(is_symplectic(m.entries(), &BigInt::from(0)).unwrap());
                assert_eq!(m.height().0, BigInt::from(1));
            }
        }
    }

    /// Breadth-first word search: every height-1 element of `SL_2(Z)` is a
    /// word of length at most 10 in the generators and their inverses.
    #[test]
    fn generators_g1_reach_all_height_one_elements() {
        let mut letters = generators::<i64>(1);
        letters.extend(letters.clone().iter().map(|m| m.inverse()));
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let start = SymplecticMatrix::<i64>::identity(1);
        seen.insert(start.entries().as_slice().to_vec());
        let mut queue = VecDeque::from([(start, 0usize)]);
        while let Some((m, len)) = queue.pop_front() {
            if len == 10 {
                continue;
            }
            for l in &letters {
                let next = m.mul(l).unwrap();
                if next.height().0 > 4 {
                    continue;
                }
                if seen.insert(next.entries().as_slice().to_vec()) {
                    queue.push_back((next, len + 1));
                }
            }
        }
        let mut targets = 0;
        for a in -1..=1i64 {
            for b in -1..=1 {
                for c in -1..=1 {
                    for d in -1..=1 {
                        if a * d - b * c == 1 {
                            targets += 1;
                            assert!(seen.contains(&vec![a, b, c, d]), "{a} {b} {c} {d}");
                        }
                    }
                }
            }
        }
        assert_eq!(targets, 20);
    }

    #[test]
    fn partial_involution_full_set_is_j() {
        for g in 1..=3 {
            let all: Vec<usize> = (0..g).collect();
            assert_eq!(
                SymplecticMatrix::<i64>::partial_involution(g, &all),
                SymplecticMatrix::j(g)
            );
            let p = SymplecticMatrix::<i64>::partial_involution(g, &[0]);
            assert_eq!(p.residual(), 0);
        }
    }

    #[test]
    fn real_gl_embedding_uses_tolerance() {
        let u = Mat::from_vec(2, 2, vec![2.0, 1.0, 0.5, 3.0]);
        let m = SymplecticMatrix::gl_embedding(&u).unwrap();
        assert!(m.residual() < 1e-12);
        let bad = Mat::from_vec(2, 2, vec![2i64, 0, 0, 1]);
        assert!(SymplecticMatrix::gl_embedding(&bad).is_err());
    }
}
