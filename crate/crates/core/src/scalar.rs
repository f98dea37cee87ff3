//! Scalar abstractions.
//!
//! Exact integer and rational scalars (`i64`, `BigInt`, `BigRational`) and
//! floating scalars (`f32`, `f64`) share the [`Scalar`] trait so that the
//! symplectic group code can run over any of them. Geometry on the Siegel
//! upper half-space needs square roots and friends, so it is written against
//! the narrower [`Real`] trait.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

use crate::matrix::Field;

pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// `true` when arithmetic on the type is exact.
    const EXACT: bool;

    /// Tolerance used by default when checking identities in this scalar.
    fn default_tol() -> Self;

    fn from_i64(v: i64) -> Self;

    /// Nearest `f64`; saturates to +/- infinity for out-of-range values.
    fn to_f64_lossy(&self) -> f64;

    /// Exact rational value (floats convert via their binary expansion).
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(self.to_f64_lossy()).expect("finite scalar")
    }

    /// `ln |x|`, finite even when `x` does not fit into an `f64`.
    fn ln_abs(&self) -> f64 {
        self.to_f64_lossy().abs().ln()
    }
}

impl Scalar for i64 {
    const EXACT: bool = true;
    fn default_tol() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
}

impl Scalar for BigInt {
    const EXACT: bool = true;
    fn default_tol() -> Self {
        BigInt::from(0)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(if self.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
    fn ln_abs(&self) -> f64 {
        let bits = self.bits();
        if bits < 1000 {
            return self.to_f64_lossy().abs().ln();
        }
        // keep the top 64 bits
        let shift = bits - 64;
        let top: BigInt = self.abs() >> shift;
        top.to_f64_lossy().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn default_tol() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn default_tol() -> Self {
        1e-9
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn default_tol() -> Self {
        1e-4
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

/// Floating scalar used for points of the Siegel upper half-space.
pub trait Real: Scalar + Float + FromPrimitive + Display + Field {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl<T> Real for T where T: Scalar + Float + FromPrimitive + Display + Field {}

/// Converts an exact or floating scalar into a floating one.
pub fn to_real<S: Scalar, T: Real>(v: &S) -> T {
    T::lit(v.to_f64_lossy())
}
