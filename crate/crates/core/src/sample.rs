//! Seeded random samplers for group elements, points and tangents.

use num_complex::Complex64;
use rand::Rng;

use crate::geometry::SiegelPoint;
use crate::matrix::{CMat, Mat};
use crate::symplectic::{generators, SymplecticMatrix};

fn symmetric<R: Rng>(g: usize, rng: &mut R, scale: f64) -> Mat<f64> {
    let mut m = Mat::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let v = rng.gen_range(-scale..=scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `A A^t + floor I` with `A` uniform in `[-1, 1]`.
pub fn positive_definite<R: Rng>(g: usize, rng: &mut R, floor: f64) -> Mat<f64> {
    let a = Mat::from_fn(g, g, |_, _| rng.gen_range(-1.0..=1.0));
    a.mul(&a.transpose()).add(&Mat::identity(g).scale(&floor)).symmetrize()
}

/// `X` uniform in `[-1, 1]`, `Y` from [`positive_definite`] with floor `0.2`.
pub fn point<R: Rng>(g: usize, rng: &mut R) -> SiegelPoint<f64> {
    let x = symmetric(g, rng, 1.0);
    let y = positive_definite(g, rng, 0.2);
    SiegelPoint::new(x, y).expect("sampled Y is positive definite")
}

/// `X + i eps Y0` with `eps = 10^{-u}`, `u` uniform in `[0, depth]`: points
/// drifting towards the boundary.
pub fn boundary_point<R: Rng>(g: usize, rng: &mut R, depth: f64) -> SiegelPoint<f64> {
    let x = symmetric(g, rng, 0.5);
    let y0 = positive_definite(g, rng, 0.5);
    let eps = 10f64.powf(-rng.gen_range(0.0..=depth));
    SiegelPoint::new(x, y0.scale(&eps)).expect("sampled Y is positive definite")
}

/// Product of `len` generators or their inverses.
pub fn word<R: Rng>(g: usize, len: usize, rng: &mut R) -> SymplecticMatrix<i64> {
    let gens = generators::<i64>(g);
    let mut m = SymplecticMatrix::identity(g);
    for _ in 0..len {
        let s = &gens[rng.gen_range(0..gens.len())];
        let s = if rng.gen_bool(0.5) { s.inverse() } else { s.clone() };
        m = m.mul(&s).expect("same genus");
    }
    m
}

/// A real symplectic matrix `T_S diag(U, U^{-t}) J^e T_S'` with moderate
/// entries.
pub fn real_symplectic<R: Rng>(g: usize, rng: &mut R) -> SymplecticMatrix<f64> {
    let t1 = SymplecticMatrix::translation(&symmetric(g, rng, 1.0)).expect("symmetric");
    let t2 = SymplecticMatrix::translation(&symmetric(g, rng, 1.0)).expect("symmetric");
    let u = Mat::from_fn(g, g, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        base + rng.gen_range(-0.3..=0.3)
    });
    let l = SymplecticMatrix::gl_embedding(&u).expect("near-identity block is invertible");
    let mut m = t1.mul(&l).expect("same genus");
    if rng.gen_bool(0.5) {
        m = m.mul(&SymplecticMatrix::j(g)).expect("same genus");
    }
    m.mul(&t2).expect("same genus")
}

/// Symmetric complex tangent with entries of modulus at most `scale`.
pub fn tangent<R: Rng>(g: usize, rng: &mut R, scale: f64) -> CMat<f64> {
    let re = symmetric(g, rng, scale);
    let im = symmetric(g, rng, scale);
    Mat::from_fn(g, g, |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}
