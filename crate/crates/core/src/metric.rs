//! The invariant metric `Tr(Y^{-1} dZ Y^{-1} dZbar)` and quantities derived
//! from it.

use num_complex::Complex64;

use crate::chart::CurveChart;
use crate::domain::in_fundamental_domain;
use crate::error::{Error, Result};
use crate::geometry::SiegelPoint;
use crate::matrix::{conj, lift, CMat, Mat};

fn check_tangent(z: &SiegelPoint<f64>, dz: &CMat<f64>) -> Result<()> {
    let g = z.genus();
    if dz.rows() != g || dz.cols() != g {
        return Err(Error::GenusMismatch {
            left: g,
            right: dz.rows(),
        });
    }
    let scale = 1.0 + dz.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let asym = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .map(|(i, j)| (dz[(i, j)] - dz[(j, i)]).norm())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

fn imag_inverse(z: &SiegelPoint<f64>) -> Mat<f64> {
    z.y().inverse().expect("positive definite").symmetrize()
}

/// `Tr(Y^{-1} dZ Y^{-1} conj(dZ))` for a symmetric tangent `dZ`.
pub fn metric_at(z: &SiegelPoint<f64>, dz: &CMat<f64>) -> Result<f64> {
    check_tangent(z, dz)?;
    Ok(metric_unchecked(&imag_inverse(z), dz))
}

fn metric_unchecked(yinv: &Mat<f64>, dz: &CMat<f64>) -> f64 {
    let w = lift(yinv);
    w.mul(dz).mul(&w).mul(&conj(dz)).trace().re.max(0.0)
}

/// `(Tr(Y^{-1} dZ Y^{-1} dZbar), sum |dz_ij|^2 / (y_ii y_jj))` for `Z` in
/// the fundamental domain.
pub fn comparison_bound_check(z: &SiegelPoint<f64>, dz: &CMat<f64>, tol: f64) -> Result<(f64, f64)> {
    let report = in_fundamental_domain(z, tol);
    if !report.in_domain {
        return Err(Error::Precondition(format!(
            "point outside the fundamental domain (violates {:?})",
            report.violated_conditions
        )));
    }
    let lhs = metric_at(z, dz)?;
    let g = z.genus();
    let y = z.y();
    let mut rhs = 0.0;
    for i in 0..g {
        for j in 0..g {
            rhs += dz[(i, j)].norm_sqr() / (y[(i, i)] * y[(j, j)]);
        }
    }
    Ok((lhs, rhs))
}

/// Supremum of `lhs / rhs` over all tangents at `Z`.
///
/// With `Y = D R D`, `D` the diagonal square roots, the ratio is a quadratic
/// form in `D^{-1} dZ D^{-1}` whose maximum is `lambda_min(R)^{-2}`.
pub fn comparison_sup_ratio(z: &SiegelPoint<f64>) -> f64 {
    let y = z.y();
    let g = z.genus();
    let r = Mat::from_fn(g, g, |i, j| y[(i, j)] / (y[(i, i)] * y[(j, j)]).sqrt());
    let lmin = r.symmetric_eigenvalues()[0];
    1.0 / (lmin * lmin)
}

/// Induced area density of the chart at `t`, per unit Lebesgue area in the
/// `t`-plane.
pub fn curve_area_element(chart: &CurveChart, t: Complex64) -> Result<f64> {
    let z = chart.point(t)?;
    Ok(metric_unchecked(&imag_inverse(&z), &chart.derivative_at(t)))
}

/// Central finite-difference pushforward of `dZ` under `W -> f(W)`.
pub fn pushforward<F>(f: F, z: &SiegelPoint<f64>, dz: &CMat<f64>, step: f64) -> Result<CMat<f64>>
where
    F: Fn(&SiegelPoint<f64>) -> Result<SiegelPoint<f64>>,
{
    let shifted = |s: f64| -> Result<CMat<f64>> {
        let w = z.z().add(&dz.map(|v| v * s));
        Ok(f(&SiegelPoint::from_complex(&w)?)?.z())
    };
    let plus = shifted(step)?;
    let minus = shifted(-step)?;
    Ok(plus.sub(&minus).map(|v| v / (2.0 * step)))
}
