//! Log-log least-squares fits used as empirical witnesses of polynomial
//! bounds `F <= a G^b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|y - (intercept + slope x)|` over the fitted points.
    pub max_residual: f64,
    pub n: usize,
}

impl BoundFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares of `ys` against `xs`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<BoundFit> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} point(s); need at least 2")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite value".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= f64::EPSILON * nf * (1.0 + mx * mx) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(BoundFit {
        slope,
        intercept,
        max_residual,
        n,
    })
}

/// Fits `ln y = intercept + slope ln x`; every value must be positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<BoundFit> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateFit(
            "log-log fit needs strictly positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs: Vec<f64> = (1..=6).map(|t| t as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|t| t * t).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        let flat = fit_loglog(&xs, &[7.0; 6]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_line(&[1.0], &[2.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(
            fit_line(&[1.0, 1.0, 1.0], &[2.0, 3.0, 4.0]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }
}
