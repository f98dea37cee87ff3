//! Polynomial curve charts `t -> Z(t)` and complex polynomial roots.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SiegelPoint;
use crate::matrix::{CMat, Mat};

/// Complex polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly::new((0..n).map(|i| at(self, i) + at(other, i)).collect())
    }

    /// `p(a t + b)`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Poly {
        // Horner in polynomial arithmetic
        let lin = Poly::new(vec![b, a]);
        let mut acc = Poly::constant(Complex64::new(0.0, 0.0));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(*c));
        }
        acc
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(Complex64::new(0.0, 0.0));
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// All roots with multiplicity (Aberth-Ehrlich iteration).
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|c| c / lead).collect();
        if n == 1 {
            return vec![-monic[0]];
        }
        if n == 2 {
            let (b, c) = (monic[1], monic[0]);
            let disc = (b * b - 4.0 * c).sqrt();
            // avoid cancellation
            let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
            if q.norm() == 0.0 {
                return vec![q, q];
            }
            return vec![q, c / q];
        }
        let p = Poly { coeffs: monic };
        let dp = p.derivative();
        let radius = 1.0
            + p.coeffs[..n]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved: f64 = 0.0;
            for i in 0..n {
                let pz = p.eval(z[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let ratio = pz / dp.eval(z[i]);
                let repel: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = z[i] - z[j];
                        if d.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            1.0 / d
                        }
                    })
                    .sum();
                let denom = Complex64::new(1.0, 0.0) - ratio * repel;
                let step = if denom.is_finite() && denom.norm() > 0.0 && ratio.is_finite() {
                    ratio / denom
                } else {
                    Complex64::new(1e-3 * radius, 0.0)
                };
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

/// Parameter region of a chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartDomain {
    /// `re.0 <= Re t <= re.1`, `im.0 <= Im t <= im.1`; bounds may be infinite.
    Rect { re: (f64, f64), im: (f64, f64) },
    Disk { center: Complex64, radius: f64 },
}

impl ChartDomain {
    pub fn upper_half_plane() -> Self {
        ChartDomain::Rect {
            re: (f64::NEG_INFINITY, f64::INFINITY),
            im: (0.0, f64::INFINITY),
        }
    }

    pub fn contains(&self, t: Complex64) -> bool {
        match *self {
            ChartDomain::Rect { re, im } => re.0 <= t.re && t.re <= re.1 && im.0 <= t.im && t.im <= im.1,
            ChartDomain::Disk { center, radius } => (t - center).norm() <= radius,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ChartDomain::Rect { re, im } => {
                !re.0.is_nan() && !re.1.is_nan() && !im.0.is_nan() && !im.1.is_nan() && re.0 < re.1 && im.0 < im.1
            }
            ChartDomain::Disk { center, radius } => center.is_finite() && radius.is_finite() && radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed(format!("empty or invalid chart domain {self:?}")))
        }
    }
}

/// `t -> Z(t)`, a symmetric matrix of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveChart {
    g: usize,
    entries: Mat<Poly>,
    domain: ChartDomain,
}

impl CurveChart {
    /// `entries` is row-major `g x g`; it must be symmetric.
    pub fn new(g: usize, entries: Vec<Poly>, domain: ChartDomain) -> Result<Self> {
        if g == 0 || entries.len() != g * g {
            return Err(Error::Malformed(format!(
                "{} polynomial entries for genus {g}",
                entries.len()
            )));
        }
        domain.validate()?;
        let entries = Mat::from_vec(g, g, entries);
        for i in 0..g {
            for j in 0..i {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotSymmetric { asymmetry: f64::NAN });
                }
            }
        }
        Ok(Self { g, entries, domain })
    }

    /// `Z(t) = diag(p_1(t), ..., p_g(t))`.
    pub fn diagonal(polys: Vec<Poly>, domain: ChartDomain) -> Result<Self> {
        let g = polys.len();
        let zero = Poly::constant(Complex64::new(0.0, 0.0));
        let entries = (0..g * g)
            .map(|k| if k / g == k % g { polys[k / g].clone() } else { zero.clone() })
            .collect();
        Self::new(g, entries, domain)
    }

    /// `Z(t) = t` on the upper half-plane.
    pub fn identity() -> Self {
        Self::diagonal(vec![Poly::monomial(1)], ChartDomain::upper_half_plane()).expect("valid")
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &Mat<Poly> {
        &self.entries
    }

    pub fn domain(&self) -> ChartDomain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn with_domain(&self, domain: ChartDomain) -> Result<Self> {
        domain.validate()?;
        Ok(Self {
            domain,
            ..self.clone()
        })
    }

    /// The chart `s -> Z(a s + b)` on the preimage of the current domain.
    /// Rectangles need `a` real and positive.
    pub fn reparametrize(&self, a: Complex64, b: Complex64) -> Result<Self> {
        let domain = match self.domain {
            ChartDomain::Rect { re, im } => {
                if a.im != 0.0 || a.re <= 0.0 {
                    return Err(Error::Precondition(
                        "rectangular domains only admit real positive scalings".into(),
                    ));
                }
                ChartDomain::Rect {
                    re: ((re.0 - b.re) / a.re, (re.1 - b.re) / a.re),
                    im: ((im.0 - b.im) / a.re, (im.1 - b.im) / a.re),
                }
            }
            ChartDomain::Disk { center, radius } => ChartDomain::Disk {
                center: (center - b) / a,
                radius: radius / a.norm(),
            },
        };
        Ok(Self {
            g: self.g,
            entries: self.entries.map(|p| p.compose_affine(a, b)),
            domain,
        })
    }

    pub fn eval(&self, t: Complex64) -> CMat<f64> {
        self.entries.map(|p| p.eval(t))
    }

    pub fn derivative_at(&self, t: Complex64) -> CMat<f64> {
        self.entries.map(|p| p.derivative().eval(t))
    }

    /// `Z(t)` as a point; errors outside `H_g`.
    pub fn point(&self, t: Complex64) -> Result<SiegelPoint<f64>> {
        SiegelPoint::from_complex(&self.eval(t))
    }
}
