//! Reduction into the Siegel fundamental domain.
//!
//! The classical highest-point iteration: Minkowski-reduce `Y` through
//! `diag(U, U^{-t})`, translate `X` into `[-1/2, 1/2]` through `T_S`, and
//! while some test element has `|det(CZ + D)| < 1` apply the one with the
//! smallest value, which multiplies `|Y|` by `|det(CZ + D)|^{-2} > 1`.
//! The element `gamma` is accumulated exactly.
//!
//! Points on the boundary of the domain are canonicalized afterwards: among
//! the images under boundary-stabilizing candidates that stay in the domain,
//! the one with lexicographically smallest `(X, Y)` wins.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::domain::{det_test_set, in_fundamental_domain, is_minkowski_reduced, min_automorphy, minkowski_conditions, DomainReport};
use crate::error::{Error, Result};
use crate::fit::{fit_loglog, BoundFit};
use crate::geometry::{act, automorphy_det, PointNorm, SiegelPoint};
use crate::matrix::Mat;
use crate::scalar::Real;
use crate::symplectic::{symmetric_unit, MatrixHeight, SymplecticMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceConfig {
    /// Maximum number of iterations of the reduction loop.
    pub step_budget: usize,
    /// Slack for domain membership and boundary comparisons.
    pub tol: f64,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        Self {
            step_budget: 100_000,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionResult<T> {
    pub gamma: SymplecticMatrix<BigInt>,
    pub reduced_point: SiegelPoint<T>,
    /// Number of group elements applied.
    pub steps: usize,
    pub height_in: PointNorm<T>,
    pub height_gamma: MatrixHeight<BigInt>,
    /// Membership report of the reduced point (carries the heuristic flag).
    pub report: DomainReport,
    /// `|Y|` after each det-condition step, starting with the input value.
    pub imag_det_trace: Vec<f64>,
}

fn gram<T: Real>(y: &Mat<T>, u: &Mat<i64>) -> Mat<T> {
    let uf: Mat<T> = u.cast();
    uf.mul(y).mul(&uf.transpose()).symmetrize()
}

fn swap_rows(u: &mut Mat<i64>, a: usize, b: usize) {
    for c in 0..u.cols() {
        let t = u[(a, c)];
        u[(a, c)] = u[(b, c)];
        u[(b, c)] = t;
    }
}

/// Minkowski reduction of a positive definite `Y` for `g <= 3`.
///
/// Returns unimodular `U` and `U Y U^t`. Pairwise size reduction (Lagrange
/// steps) is followed by exchange steps against the finite Minkowski
/// condition list until no condition fails, then signs are normalized so
/// that `y_{k,k+1} >= 0`.
pub fn minkowski_reduce<T: Real>(y: &Mat<T>) -> Result<(Mat<i64>, Mat<T>)> {
    let g = y.rows();
    if g > 3 {
        return Err(Error::UnsupportedGenus(g));
    }
    if y.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite {
            smallest_eigenvalue: y.symmetric_eigenvalues()[0].to_f64_lossy(),
        });
    }
    let conditions = minkowski_conditions(g);
    let mut u = Mat::<i64>::identity(g);
    let budget = 10_000;
    let rel = 1e-12;
    'outer: for _ in 0..budget {
        let q = gram(y, &u);
        let f = |i: usize, j: usize| q[(i, j)].to_f64_lossy();

        for k in 0..g.saturating_sub(1) {
            if f(k + 1, k + 1) < f(k, k) * (1.0 - rel) {
                swap_rows(&mut u, k, k + 1);
                continue 'outer;
            }
        }
        for j in 1..g {
            for i in (0..j).rev() {
                if f(i, j).abs() > f(i, i) * 0.5 * (1.0 + rel) {
                    let m = (f(i, j) / f(i, i)).round();
                    if m.abs() > 1e15 {
                        return Err(Error::Precision {
                            det_abs: f64::NAN,
                            precision: 53,
                        });
                    }
                    let m = m as i64;
                    for c in 0..g {
                        u[(j, c)] -= m * u[(i, c)];
                    }
                    continue 'outer;
                }
            }
        }
        for (k, v) in &conditions {
            let mut val = 0.0;
            for a in 0..g {
                for b in 0..g {
                    val += (v[a] * v[b]) as f64 * f(a, b);
                }
            }
            if val < f(*k, *k) * (1.0 - rel) {
                let p = if v[*k] != 0 {
                    *k
                } else {
                    (*k..g).find(|&p| v[p] != 0).expect("tail has a unit entry")
                };
                let row: Vec<i64> = (0..g)
                    .map(|c| (0..g).map(|a| v[a] * u[(a, c)]).sum())
                    .collect();
                for (c, val) in row.into_iter().enumerate() {
                    u[(p, c)] = val;
                }
                swap_rows(&mut u, p, *k);
                continue 'outer;
            }
        }
        for k in 0..g.saturating_sub(1) {
            if f(k, k + 1) < 0.0 {
                for c in 0..g {
                    u[(k + 1, c)] = -u[(k + 1, c)];
                }
                continue 'outer;
            }
        }
        let reduced = gram(y, &u);
        return Ok((u, reduced));
    }
    Err(Error::BudgetExceeded {
        budget,
        diagnostics: "Minkowski reduction did not settle".into(),
    })
}

fn to_big(m: &SymplecticMatrix<i64>) -> SymplecticMatrix<BigInt> {
    m.convert(|v| BigInt::from(*v))
}

struct Walk<T> {
    point: SiegelPoint<T>,
    gamma: SymplecticMatrix<BigInt>,
    steps: usize,
}

impl<T: Real> Walk<T> {
    fn apply(&mut self, m: &SymplecticMatrix<i64>) -> Result<()> {
        self.point = act(m, &self.point)?;
        self.gamma = to_big(m).mul(&self.gamma)?;
        self.steps += 1;
        Ok(())
    }
}

/// Moves `z` into the fundamental domain, returning the exact `gamma` with
/// `gamma . z = reduced_point`.
pub fn siegel_reduce<T: Real>(z: &SiegelPoint<T>, config: &ReduceConfig) -> Result<ReductionResult<T>> {
    let g = z.genus();
    if g > 3 {
        return Err(Error::UnsupportedGenus(g));
    }
    let tests = det_test_set(g);
    let mut walk = Walk {
        point: z.clone(),
        gamma: SymplecticMatrix::identity(g),
        steps: 0,
    };
    let mut trace = vec![z.imag_det().to_f64_lossy()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > config.step_budget {
            return Err(Error::BudgetExceeded {
                budget: config.step_budget,
                diagnostics: format!(
                    "{} steps applied, current |Y| = {:e}",
                    walk.steps,
                    walk.point.imag_det().to_f64_lossy()
                ),
            });
        }
        let (u, _) = minkowski_reduce(walk.point.y())?;
        if u != Mat::identity(g) {
            walk.apply(&SymplecticMatrix::gl_embedding(&u)?)?;
        }
        let shift = Mat::from_fn(g, g, |i, j| -walk.point.x()[(i, j)].to_f64_lossy().round() as i64);
        if shift != Mat::zeros(g, g) {
            walk.apply(&SymplecticMatrix::translation(&shift)?)?;
        }
        let (idx, min_det) = min_automorphy(&walk.point);
        if min_det >= 1.0 - config.tol {
            break;
        }
        let before = walk.point.imag_det().to_f64_lossy();
        walk.apply(&tests[idx])?;
        let after = walk.point.imag_det().to_f64_lossy();
        if !(after > before) {
            return Err(Error::BudgetExceeded {
                budget: config.step_budget,
                diagnostics: format!("|Y| failed to increase ({before:e} -> {after:e})"),
            });
        }
        trace.push(after);
    }
    canonicalize(&mut walk, config.tol)?;
    let report = in_fundamental_domain(&walk.point, config.tol);
    let height_gamma = walk.gamma.height();
    Ok(ReductionResult {
        gamma: walk.gamma,
        reduced_point: walk.point,
        steps: walk.steps,
        height_in: z.norm_h(),
        height_gamma,
        report,
        imag_det_trace: trace,
    })
}

/// Upper triangle of `X` then of `Y`, row-major.
fn sort_key<T: Real>(z: &SiegelPoint<T>) -> Vec<f64> {
    let g = z.genus();
    let mut key = Vec::with_capacity(g * (g + 1));
    for m in [z.x(), z.y()] {
        for i in 0..g {
            for j in i..g {
                key.push(m[(i, j)].to_f64_lossy());
            }
        }
    }
    key
}

fn lex_less(a: &[f64], b: &[f64], tol: f64) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x < y;
        }
    }
    false
}

fn signed_permutations(g: usize) -> Vec<Mat<i64>> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut out = Vec::new();
    for p in perms(g) {
        for signs in 0..(1u32 << g) {
            let m = Mat::from_fn(g, g, |i, j| {
                if p[i] == j {
                    if signs & (1 << i) != 0 {
                        -1
                    } else {
                        1
                    }
                } else {
                    0
                }
            });
            let trivial = m == Mat::identity(g) || m == Mat::<i64>::identity(g).neg();
            if !trivial {
                out.push(m);
            }
        }
    }
    out
}

const BOUNDARY_BAND: f64 = 1e-7;

fn canonicalize<T: Real>(walk: &mut Walk<T>, tol: f64) -> Result<()> {
    let g = walk.point.genus();
    for _ in 0..8 {
        let report = in_fundamental_domain(&walk.point, tol);
        if report.min_margin() > BOUNDARY_BAND {
            return Ok(());
        }
        let mut candidates: Vec<SymplecticMatrix<i64>> = Vec::new();
        let near_half = walk
            .point
            .x()
            .iter()
            .any(|v| (v.to_f64_lossy().abs() - 0.5).abs() <= BOUNDARY_BAND);
        if near_half {
            for i in 0..g {
                for j in i..g {
                    for e in [-1, 1] {
                        let s = symmetric_unit::<i64>(g, i, j).scale(&e);
                        candidates.push(SymplecticMatrix::translation(&s)?);
                    }
                }
            }
        }
        if g > 1 && !is_minkowski_reduced(walk.point.y(), -BOUNDARY_BAND) {
            for u in signed_permutations(g) {
                candidates.push(SymplecticMatrix::gl_embedding(&u)?);
            }
        }
        for m in det_test_set(g) {
            let d = automorphy_det(m, &walk.point).norm().to_f64_lossy();
            if (d - 1.0).abs() <= BOUNDARY_BAND {
                candidates.push(m.clone());
            }
        }
        let mut best: Option<(SymplecticMatrix<i64>, Vec<f64>)> = None;
        let current = sort_key(&walk.point);
        for c in candidates {
            let Ok(img) = act(&c, &walk.point) else {
                continue;
            };
            if !in_fundamental_domain(&img, tol).in_domain {
                continue;
            }
            let key = sort_key(&img);
            let reference = best.as_ref().map_or(&current, |(_, k)| k);
            if lex_less(&key, reference, BOUNDARY_BAND) {
                best = Some((c, key));
            }
        }
        match best {
            Some((c, _)) => walk.apply(&c)?,
            None => return Ok(()),
        }
    }
    Ok(())
}

/// Reduces every sample and fits `ln H(gamma_Z)` against `ln h(Z)`.
pub fn reduction_height_survey<T: Real>(
    samples: &[SiegelPoint<T>],
    config: &ReduceConfig,
) -> Result<BoundFit> {
    let rows = reduction_height_rows(samples, config)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    fit_loglog(&xs, &ys)
}

/// `(h(Z), H(gamma_Z))` for each sample, in input order.
pub fn reduction_height_rows<T: Real>(
    samples: &[SiegelPoint<T>],
    config: &ReduceConfig,
) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::DegenerateFit("no samples".into()));
    }
    samples
        .par_iter()
        .map(|z| {
            let r = siegel_reduce(z, config)?;
            Ok((
                r.height_in.value().to_f64_lossy(),
                r.height_gamma.ln().exp(),
            ))
        })
        .collect()
}
