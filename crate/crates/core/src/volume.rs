//! Volumes of chart images: `C ∩ S_g` and the height-bounded pieces
//! `C_M = {Z in C : h(Z) <= M}`.
//!
//! Two routes. The `t`-space route integrates the area element over the
//! chart parameter against the region indicator. For `g = 1` the default is
//! the preimage route instead: by the change of variables `w = p(t)` the
//! same integral equals the hyperbolic integral of the preimage count
//! `N(w) = #{t in domain : p(t) = w}`, taken in coordinates
//! `(x, v = 1/y)` where `dx dy / y^2 = dx dv` and both regions are compact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartDomain, CurveChart, Poly};
use crate::domain::in_fundamental_domain;
use crate::error::{Error, Result};
use crate::fit::{fit_loglog, BoundFit};
use crate::integrate::{integrate_unit_square, SamplingConfig, VolumeEstimate};
use crate::metric::curve_area_element;

/// Region of `H_g` whose intersection with the curve is measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// The fundamental domain, closed with the given slack.
    FundamentalDomain { tol: f64 },
    /// `h(Z) <= M`.
    HeightAtMost(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Preimage counting for `g = 1`, `t`-space otherwise.
    Auto,
    ParameterSpace,
    Preimage,
}

pub fn curve_volume_in_domain(chart: &CurveChart, config: &SamplingConfig) -> Result<VolumeEstimate> {
    region_volume(chart, Region::FundamentalDomain { tol: 1e-9 }, Route::Auto, config)
}

pub fn region_volume(
    chart: &CurveChart,
    region: Region,
    route: Route,
    config: &SamplingConfig,
) -> Result<VolumeEstimate> {
    if chart.degree() == 0 {
        return Ok(VolumeEstimate::zero(config.method));
    }
    let preimage = match route {
        Route::Auto => chart.genus() == 1,
        Route::Preimage => {
            if chart.genus() != 1 {
                return Err(Error::UnsupportedGenus(chart.genus()));
            }
            true
        }
        Route::ParameterSpace => false,
    };
    if preimage {
        preimage_volume(chart, region, config)
    } else {
        parameter_volume(chart, region, config)
    }
}

fn count_preimages(p: &Poly, domain: &ChartDomain, w: Complex64) -> usize {
    let mut c = p.coeffs().to_vec();
    c[0] -= w;
    Poly::new(c)
        .roots()
        .into_iter()
        .filter(|t| t.im > 0.0 && domain.contains(*t))
        .count()
}

fn preimage_volume(chart: &CurveChart, region: Region, config: &SamplingConfig) -> Result<VolumeEstimate> {
    let p = chart.entries()[(0, 0)].clone();
    let domain = chart.domain();
    let n = |x: f64, v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        count_preimages(&p, &domain, Complex64::new(x, 1.0 / v)) as f64
    };
    let est = match region {
        Region::FundamentalDomain { .. } => integrate_unit_square(
            |a, b| {
                let x = a - 0.5;
                let vmax = 1.0 / (1.0 - x * x).sqrt();
                vmax * n(x, vmax * b)
            },
            config,
        ),
        Region::HeightAtMost(m) => {
            check_height_bound(m)?;
            let (lo, hi) = (1.0 / m, m);
            integrate_unit_square(
                |a, b| {
                    let v = lo + (hi - lo) * b;
                    let xmax = (m * m - 1.0 / (v * v)).max(0.0).sqrt();
                    (hi - lo) * 2.0 * xmax * n(xmax * (2.0 * a - 1.0), v)
                },
                config,
            )
        }
    };
    Ok(est)
}

fn check_height_bound(m: f64) -> Result<()> {
    if !(m > 1.0) || !m.is_finite() {
        return Err(Error::Precondition(format!("height bound {m} must exceed 1")));
    }
    Ok(())
}

/// One coordinate of the unit square mapped onto an interval, with the
/// Jacobian of the map.
#[derive(Clone, Copy, Debug)]
enum Axis {
    Linear(f64, f64),
    /// `y = 1/v` with `v` uniform on `[1/hi, 1/lo]`; `hi` may be infinite.
    Reciprocal(f64, f64),
    /// `[lo, inf)`.
    Upper(f64),
    /// `(-inf, hi]`.
    Lower(f64),
    /// The whole line via `tan`.
    Line,
}

impl Axis {
    fn for_interval(lo: f64, hi: f64, positive: bool) -> Axis {
        match (lo.is_finite(), hi.is_finite()) {
            _ if positive && lo > 0.0 && lo.is_finite() => Axis::Reciprocal(lo, hi),
            (true, true) => Axis::Linear(lo, hi),
            (true, false) => Axis::Upper(lo),
            (false, true) => Axis::Lower(hi),
            (false, false) => Axis::Line,
        }
    }

    fn map(&self, u: f64) -> (f64, f64) {
        match *self {
            Axis::Linear(a, b) => (a + (b - a) * u, b - a),
            Axis::Reciprocal(lo, hi) => {
                let (v0, v1) = (1.0 / hi, 1.0 / lo);
                let v = v0 + (v1 - v0) * u;
                let y = 1.0 / v;
                (y, (v1 - v0) * y * y)
            }
            Axis::Upper(a) => {
                let s = u / (1.0 - u);
                (a + s, 1.0 / ((1.0 - u) * (1.0 - u)))
            }
            Axis::Lower(b) => {
                let s = u / (1.0 - u);
                (b - s, 1.0 / ((1.0 - u) * (1.0 - u)))
            }
            Axis::Line => {
                let x = (std::f64::consts::PI * (u - 0.5)).tan();
                (x, std::f64::consts::PI * (1.0 + x * x))
            }
        }
    }
}

/// Radius outside which some entry of `Z(t)` exceeds `m` in modulus
/// (Cauchy's root bound applied to `p(t) - c`, `|c| <= m`).
fn height_radius(chart: &CurveChart, m: f64) -> Option<f64> {
    chart
        .entries()
        .iter()
        .filter(|p| p.degree() > 0)
        .map(|p| {
            let c = p.coeffs();
            let d = p.degree();
            let lead = c[d].norm();
            let worst = c[..d]
                .iter()
                .enumerate()
                .map(|(i, a)| a.norm() + if i == 0 { m } else { 0.0 })
                .fold(0.0, f64::max);
            1.0 + worst / lead
        })
        .reduce(f64::min)
}

fn parameter_volume(chart: &CurveChart, region: Region, config: &SamplingConfig) -> Result<VolumeEstimate> {
    if let Region::HeightAtMost(m) = region {
        check_height_bound(m)?;
    }
    let inside = |t: Complex64| -> f64 {
        let Ok(z) = chart.point(t) else {
            return 0.0;
        };
        let keep = match region {
            Region::FundamentalDomain { tol } => in_fundamental_domain(&z, tol).in_domain,
            Region::HeightAtMost(m) => z.norm_h().value() <= m,
        };
        if keep {
            curve_area_element(chart, t).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let est = match chart.domain() {
        ChartDomain::Rect { mut re, mut im } => {
            if let Some(r) = match region {
                Region::HeightAtMost(m) => height_radius(chart, m),
                Region::FundamentalDomain { .. } => None,
            } {
                re = (re.0.max(-r), re.1.min(r));
                im = (im.0.max(-r), im.1.min(r));
                if re.0 >= re.1 || im.0 >= im.1 {
                    return Ok(VolumeEstimate::zero(config.method));
                }
            }
            let ax = Axis::for_interval(re.0, re.1, false);
            let ay = Axis::for_interval(im.0, im.1, true);
            integrate_unit_square(
                |a, b| {
                    let (x, jx) = ax.map(a);
                    let (y, jy) = ay.map(b);
                    if !(x.is_finite() && y.is_finite() && jx.is_finite() && jy.is_finite()) {
                        return 0.0;
                    }
                    let v = inside(Complex64::new(x, y));
                    if v == 0.0 {
                        0.0
                    } else {
                        v * jx * jy
                    }
                },
                config,
            )
        }
        ChartDomain::Disk { center, radius } => {
            let area = std::f64::consts::PI * radius * radius;
            integrate_unit_square(
                |a, b| {
                    let t = center + Complex64::from_polar(radius * a.sqrt(), 2.0 * std::f64::consts::PI * b);
                    area * inside(t)
                },
                config,
            )
        }
    };
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: f64,
    pub volume: VolumeEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub rows: Vec<ProfileRow>,
    pub fit: BoundFit,
}

/// `vol(C_M)` for each `M`, and the log-log fit of volume against `M`.
pub fn boundary_volume_profile(
    chart: &CurveChart,
    m_values: &[f64],
    config: &SamplingConfig,
) -> Result<BoundaryProfile> {
    if m_values.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} height bounds; need at least 3",
            m_values.len()
        )));
    }
    if m_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("height bounds must be strictly increasing".into()));
    }
    let rows = m_values
        .iter()
        .map(|&m| {
            Ok(ProfileRow {
                m,
                volume: region_volume(chart, Region::HeightAtMost(m), Route::Auto, config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.m).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.volume.value).collect();
    let fit = fit_loglog(&xs, &ys)?;
    Ok(BoundaryProfile { rows, fit })
}

/// `vol(C_M)` for the identity chart on the upper half-plane, by
/// one-dimensional quadrature of `2 sqrt(M^2 - v^{-2})` over `[1/M, M]`.
pub fn identity_height_volume(m: f64) -> f64 {
    // v = 1/M + s^2 removes the square-root endpoint singularity
    let lo = 1.0 / m;
    let smax = (m - lo).sqrt();
    let nodes = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189),
        (-0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.0, 0.568_888_888_888_889),
        (0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.906_179_845_938_664, 0.236_926_885_056_189),
    ];
    let panels = 4000;
    let h = smax / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in nodes {
            let s = mid + 0.5 * h * x;
            let v = lo + s * s;
            let f = 2.0 * (m * m - 1.0 / (v * v)).max(0.0).sqrt() * 2.0 * s;
            total += 0.5 * h * w * f;
        }
    }
    total
}
