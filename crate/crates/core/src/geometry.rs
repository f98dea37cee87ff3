//! Points of the Siegel upper half-space `H_g` and the symplectic action.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::{complexify, conj, imag_part, lift, max_modulus, real_part, CMat, Mat};
use crate::scalar::{Real, Scalar};
use crate::symplectic::SymplecticMatrix;

/// Working precision carried by freshly constructed points, in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// `Z = X + iY` with `X, Y` real symmetric and `Y` positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint<T> {
    g: usize,
    x: Mat<T>,
    y: Mat<T>,
    precision: u32,
}

/// `h(Z) = max(1, |z_ij|, |Y|^{-1})`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PointNorm<T>(pub T);

impl<T: Real> PointNorm<T> {
    pub fn value(&self) -> T {
        self.0
    }

    pub fn ln(&self) -> f64 {
        self.0.to_f64_lossy().ln()
    }
}

fn symmetry_tol<T: Real>(m: &Mat<T>) -> T {
    T::default_tol() * (T::one() + m.max_abs())
}

impl<T: Real> SiegelPoint<T> {
    /// Validates and symmetrizes `X + iY`.
    pub fn new(x: Mat<T>, y: Mat<T>) -> Result<Self> {
        if !x.is_square() || !y.is_square() || x.rows() != y.rows() || x.rows() == 0 {
            return Err(Error::Malformed(format!(
                "X is {}x{} and Y is {}x{}; expected matching nonempty square blocks",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols()
            )));
        }
        for m in [&x, &y] {
            let asym = m.asymmetry();
            if !(asym <= symmetry_tol(m)) {
                return Err(Error::NotSymmetric {
                    asymmetry: asym.to_f64_lossy(),
                });
            }
        }
        let (x, y) = (x.symmetrize(), y.symmetrize());
        if y.cholesky().is_none() {
            let smallest = y.symmetric_eigenvalues()[0];
            return Err(Error::NotPositiveDefinite {
                smallest_eigenvalue: smallest.to_f64_lossy(),
            });
        }
        Ok(Self {
            g: x.rows(),
            x,
            y,
            precision: DEFAULT_PRECISION,
        })
    }

    pub fn from_complex(z: &CMat<T>) -> Result<Self> {
        Self::new(real_part(z), imag_part(z))
    }

    /// `i Y` with `X = 0`.
    pub fn imaginary(y: Mat<T>) -> Result<Self> {
        let g = y.rows();
        Self::new(Mat::zeros(g, g), y)
    }

    /// `i I_g`.
    pub fn i_identity(g: usize) -> Self {
        Self::imaginary(Mat::identity(g)).expect("identity is positive definite")
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = bits;
        self
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn x(&self) -> &Mat<T> {
        &self.x
    }

    pub fn y(&self) -> &Mat<T> {
        &self.y
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn z(&self) -> CMat<T> {
        complexify(&self.x, &self.y)
    }

    /// `|Y|`, the determinant of the imaginary part.
    pub fn imag_det(&self) -> T {
        self.y.det()
    }

    pub fn norm_h(&self) -> PointNorm<T> {
        let entries = max_modulus(&self.z());
        let inv_det = T::one() / self.imag_det();
        PointNorm(T::one().max(entries).max(inv_det))
    }

    pub fn cast<U: Real>(&self) -> SiegelPoint<U> {
        SiegelPoint {
            g: self.g,
            x: self.x.cast(),
            y: self.y.cast(),
            precision: self.precision,
        }
    }

    /// Largest entrywise distance `|z_ij - w_ij|`.
    pub fn distance(&self, other: &Self) -> T {
        max_modulus(&self.z().sub(&other.z()))
    }
}

pub(crate) fn complex_blocks<S: Scalar, T: Real>(
    m: &SymplecticMatrix<S>,
) -> [CMat<T>; 4] {
    let f = |b: Mat<S>| lift(&b.cast::<T>());
    [f(m.a()), f(m.b()), f(m.c()), f(m.d())]
}

fn check_genus<S, T>(m: &SymplecticMatrix<S>, z: &SiegelPoint<T>) -> Result<()>
where
    S: Scalar,
    T: Real,
{
    if m.genus() != z.genus() {
        return Err(Error::GenusMismatch {
            left: m.genus(),
            right: z.genus(),
        });
    }
    Ok(())
}

/// `det(CZ + D)`.
pub fn automorphy_det<S: Scalar, T: Real>(m: &SymplecticMatrix<S>, z: &SiegelPoint<T>) -> Complex<T> {
    let [_, _, c, d] = complex_blocks::<S, T>(m);
    c.mul(&z.z()).add(&d).det()
}

/// The action `Z -> (AZ + B)(CZ + D)^{-1}`.
///
/// When `|det(CZ + D)|` falls below `2^(-precision/2)` the evaluation is
/// repeated in exact rational arithmetic (the point's binary entries are
/// exact rationals) and the result carries doubled precision. Real matrices
/// get the same retry; it is exact in their binary expansion.
pub fn act<S: Scalar, T: Real>(m: &SymplecticMatrix<S>, z: &SiegelPoint<T>) -> Result<SiegelPoint<T>> {
    check_genus(m, z)?;
    let [a, b, c, d] = complex_blocks::<S, T>(m);
    let zc = z.z();
    let num = a.mul(&zc).add(&b);
    let den = c.mul(&zc).add(&d);
    let det_abs = den.det().norm();
    let floor = T::lit(2f64.powf(-(z.precision as f64) / 2.0));
    if !(det_abs >= floor) {
        return act_exact(m, z);
    }
    let inv = match den.inverse() {
        Some(inv) => inv,
        None => return act_exact(m, z),
    };
    let w = num.mul(&inv);
    let x = real_part(&w).symmetrize();
    let y = imag_part(&w).symmetrize();
    match SiegelPoint::new(x, y) {
        Ok(p) => Ok(p.with_precision(z.precision)),
        Err(_) => act_exact(m, z),
    }
}

fn rational_point<T: Real>(z: &SiegelPoint<T>) -> CMat<BigRational> {
    Mat::from_fn(z.g, z.g, |i, j| {
        Complex::new(z.x[(i, j)].to_rational(), z.y[(i, j)].to_rational())
    })
}

/// Exact evaluation of the action over `Q(i)`, rounded back to `T`.
pub fn act_exact<S: Scalar, T: Real>(m: &SymplecticMatrix<S>, z: &SiegelPoint<T>) -> Result<SiegelPoint<T>> {
    check_genus(m, z)?;
    let q = |b: Mat<S>| b.map(|v| Complex::new(v.to_rational(), BigRational::zero()));
    let (a, b, c, d) = (q(m.a()), q(m.b()), q(m.c()), q(m.d()));
    let zq = rational_point(z);
    let num = a.mul(&zq).add(&b);
    let den = c.mul(&zq).add(&d);
    let det = den.det();
    let precision = z.precision.saturating_mul(2);
    if det.is_zero() {
        return Err(Error::Precision {
            det_abs: 0.0,
            precision,
        });
    }
    let w = num.mul(&den.inverse().expect("nonzero determinant"));
    let to_t = |v: &BigRational| T::lit(v.to_f64().unwrap_or(f64::NAN));
    let x = w.map(|e| to_t(&e.re)).symmetrize();
    let y = w.map(|e| to_t(&e.im)).symmetrize();
    SiegelPoint::new(x, y)
        .map(|p| p.with_precision(precision))
        .map_err(|_| Error::Precision {
            det_abs: det.norm_sqr().to_f64().unwrap_or(0.0).sqrt(),
            precision,
        })
}

/// `(C Zbar + D) Y^{-1} (C Z + D)^t`, which equals `Im(M Z)^{-1}`.
pub fn transformed_imag_inverse<S: Scalar, T: Real>(
    m: &SymplecticMatrix<S>,
    z: &SiegelPoint<T>,
) -> Result<Mat<T>> {
    check_genus(m, z)?;
    let [_, _, c, d] = complex_blocks::<S, T>(m);
    let zc = z.z();
    let left = c.mul(&conj(&zc)).add(&d);
    let right = c.mul(&zc).add(&d).transpose();
    let y_inv = z.y.inverse().ok_or(Error::NotPositiveDefinite {
        smallest_eigenvalue: 0.0,
    })?;
    let w = left.mul(&lift(&y_inv)).mul(&right);
    Ok(real_part(&w).symmetrize())
}

/// `max |(C Zbar + D)^t (AZ + B) - (A Zbar + B)^t (CZ + D) - 2iY|`.
pub fn symplectic_identity_residual<S: Scalar, T: Real>(
    m: &SymplecticMatrix<S>,
    z: &SiegelPoint<T>,
) -> Result<T> {
    check_genus(m, z)?;
    let [a, b, c, d] = complex_blocks::<S, T>(m);
    let zc = z.z();
    let zb = conj(&zc);
    let lhs = c
        .mul(&zb)
        .add(&d)
        .transpose()
        .mul(&a.mul(&zc).add(&b))
        .sub(&a.mul(&zb).add(&b).transpose().mul(&c.mul(&zc).add(&d)));
    let two_iy = z.y.map(|v| Complex::new(T::zero(), *v + *v));
    Ok(max_modulus(&lhs.sub(&two_iy)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m1(v: [i64; 4]) -> SymplecticMatrix<i64> {
        SymplecticMatrix::new(Mat::from_vec(2, 2, v.to_vec())).unwrap()
    }

    fn p1(x: f64, y: f64) -> SiegelPoint<f64> {
        SiegelPoint::new(Mat::from_vec(1, 1, vec![x]), Mat::from_vec(1, 1, vec![y])).unwrap()
    }

    #[test]
    fn make_point_examples() {
        let p = SiegelPoint::<f64>::new(Mat::zeros(2, 2), Mat::identity(2)).unwrap();
        assert_eq!(p, SiegelPoint::i_identity(2));
        let err = SiegelPoint::<f64>::new(
            Mat::zeros(2, 2),
            Mat::from_vec(2, 2, vec![1.0, 0.0, 0.0, -1.0]),
        )
        .unwrap_err();
        match err {
            Error::NotPositiveDefinite { smallest_eigenvalue } => {
                assert!((smallest_eigenvalue + 1.0).abs() < 1e-12)
            }
            e => panic!("unexpected {e}"),
        }
        let p = p1(0.6, 0.2);
        assert_eq!(p.x()[(0, 0)], 0.6);
        assert_eq!(p.y()[(0, 0)], 0.2);
        let asym = SiegelPoint::<f64>::new(
            Mat::from_vec(2, 2, vec![0.0, 1.0, 0.0, 0.0]),
            Mat::identity(2),
        );
        assert!(matches!(asym, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn act_examples() {
        for g in 1..=3 {
            let j = SymplecticMatrix::<BigInt>::j(g);
            let out = act(&j, &SiegelPoint::<f64>::i_identity(g)).unwrap();
            assert!(out.distance(&SiegelPoint::i_identity(g)) < 1e-15);
        }
        let s = Mat::from_vec(2, 2, vec![1.0, -2.0, -2.0, 0.5]);
        let z = SiegelPoint::new(
            Mat::from_vec(2, 2, vec![0.1, 0.2, 0.2, 0.3]),
            Mat::from_vec(2, 2, vec![2.0, 0.5, 0.5, 1.0]),
        )
        .unwrap();
        let out = act(&SymplecticMatrix::translation(&s).unwrap(), &z).unwrap();
        assert!(out.x().sub(&z.x().add(&s)).max_abs() < 1e-15);
        assert!(out.y().sub(z.y()).max_abs() < 1e-15);

        let out = act(&m1([1, 1, 1, 2]), &p1(0.0, 1.0)).unwrap();
        assert!((out.x()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((out.y()[(0, 0)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn act_in_f32() {
        let m = SymplecticMatrix::new(Mat::from_vec(2, 2, vec![1i64, 1, 1, 2])).unwrap();
        let z = SiegelPoint::<f32>::new(Mat::zeros(1, 1), Mat::identity(1)).unwrap();
        let out = act(&m, &z).unwrap();
        assert!((out.x()[(0, 0)] - 0.6).abs() < 1e-6);
        assert!((out.y()[(0, 0)] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn low_precision_points_take_the_exact_route() {
        // |cz + d| = |i + 2| ~ 2.24 is above 2^-4 ...
        let m = m1([1, 1, 1, 2]);
        let z = p1(0.0, 1.0).with_precision(8);
        assert_eq!(act(&m, &z).unwrap().precision(), 8);
        // ... while |z| = 0.05 is below it
        let z = p1(0.0, 0.05).with_precision(8);
        let out = act(&SymplecticMatrix::<i64>::j(1), &z).unwrap();
        assert_eq!(out.precision(), 16);
        assert!((out.y()[(0, 0)] - 20.0).abs() < 1e-12);
        let float = act_exact(&SymplecticMatrix::<i64>::j(1), &p1(0.3, 0.7)).unwrap();
        let exact = act(&SymplecticMatrix::<i64>::j(1), &p1(0.3, 0.7)).unwrap();
        assert!(float.distance(&exact) < 1e-15);
    }

    #[test]
    fn transformed_imag_inverse_examples() {
        let z = SiegelPoint::new(
            Mat::from_vec(2, 2, vec![0.1, 0.2, 0.2, 0.3]),
            Mat::from_vec(2, 2, vec![2.0, 0.5, 0.5, 1.0]),
        )
        .unwrap();
        let r = transformed_imag_inverse(&SymplecticMatrix::<i64>::identity(2), &z).unwrap();
        assert!(r.sub(&z.y().inverse().unwrap()).max_abs() < 1e-15);
        let r = transformed_imag_inverse(
            &SymplecticMatrix::<i64>::j(3),
            &SiegelPoint::<f64>::i_identity(3),
        )
        .unwrap();
        assert!(r.sub(&Mat::identity(3)).max_abs() < 1e-15);
        let r = transformed_imag_inverse(&m1([1, 1, 1, 2]), &p1(0.0, 1.0)).unwrap();
        assert!((r[(0, 0)] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn identity_residual_examples() {
        let z = p1(0.37, 1.9);
        let r = symplectic_identity_residual(&SymplecticMatrix::<i64>::identity(1), &z).unwrap();
        assert_eq!(r, 0.0);
        for g in 1..=3 {
            let r = symplectic_identity_residual(
                &SymplecticMatrix::<i64>::j(g),
                &SiegelPoint::<f64>::i_identity(g),
            )
            .unwrap();
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn norm_examples() {
        for g in 1..=3 {
            assert_eq!(SiegelPoint::<f64>::i_identity(g).norm_h().value(), 1.0);
        }
        assert!((p1(0.6, 0.2).norm_h().value() - 5.0).abs() < 1e-14);
        let z = SiegelPoint::<f64>::imaginary(Mat::from_vec(2, 2, vec![2.0, 0.0, 0.0, 0.25])).unwrap();
        assert!((z.norm_h().value() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn genus_mismatch_is_reported() {
        let err = act(&SymplecticMatrix::<i64>::j(2), &p1(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::GenusMismatch { left: 2, right: 1 }));
    }
}
