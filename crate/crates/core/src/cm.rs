//! Genus-one special points: reduced binary quadratic forms, class numbers
//! and the CM points `tau = (-b + i sqrt|D|) / 2a`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::in_fundamental_domain;
use crate::error::{Error, Result};
use crate::fit::{fit_loglog, BoundFit};
use crate::geometry::SiegelPoint;
use crate::matrix::Mat;

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_positive_definite(&self) -> bool {
        self.discriminant() < 0 && self.a > 0
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        self.is_positive_definite() && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The root of `a tau^2 + b tau + c` in the upper half-plane.
    pub fn root(&self) -> Result<SiegelPoint<f64>> {
        if !self.is_positive_definite() {
            return Err(Error::BadDiscriminant(self.discriminant()));
        }
        let d = self.discriminant() as f64;
        let two_a = 2.0 * self.a as f64;
        SiegelPoint::new(
            Mat::from_vec(1, 1, vec![-(self.b as f64) / two_a]),
            Mat::from_vec(1, 1, vec![(-d).sqrt() / two_a]),
        )
    }

    /// `f(p x + q y, r x + s y)` for `[[p, q], [r, s]]` in `SL_2(Z)`.
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Self {
        let [[p, q], [r, s]] = m;
        let (a, b, c) = (self.a, self.b, self.c);
        Self {
            a: a * p * p + b * p * r + c * r * r,
            b: 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            c: a * q * q + b * q * s + c * s * s,
        }
    }

    /// The reduced form properly equivalent to `self` (Gauss reduction).
    pub fn reduce(&self) -> Result<Self> {
        if !self.is_positive_definite() {
            return Err(Error::BadDiscriminant(self.discriminant()));
        }
        let mut f = *self;
        loop {
            if f.b.abs() > f.a || f.b == -f.a {
                // x -> x + k y with b + 2ak in (-a, a]
                let k = Integer::div_floor(&(f.a - f.b), &(2 * f.a));
                f = f.transform([[1, k], [0, 1]]);
            } else if f.a > f.c || (f.a == f.c && f.b < 0) {
                f = f.transform([[0, -1], [1, 0]]);
            } else {
                return Ok(f);
            }
        }
    }
}

fn check_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::BadDiscriminant(d));
    }
    Ok(())
}

/// Primitive reduced forms of discriminant `d`, sorted by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadraticForm>> {
    check_discriminant(d)?;
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1;
    // a <= sqrt(|D|/3)
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadraticForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort_by_key(|f| (f.a, f.b));
    Ok(out)
}

pub fn class_number(d: i64) -> Result<usize> {
    Ok(reduced_forms(d)?.len())
}

/// The CM point of a reduced form.
pub fn cm_point(form: &QuadraticForm) -> Result<SiegelPoint<f64>> {
    if !form.is_reduced() {
        return Err(Error::NotReduced {
            a: form.a,
            b: form.b,
            c: form.c,
        });
    }
    form.root()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmRecord {
    pub d: i64,
    pub class_number: usize,
    pub forms: Vec<QuadraticForm>,
    pub points: Vec<SiegelPoint<f64>>,
    /// Largest `h(tau)` over the points.
    pub max_height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmSurvey {
    pub records: Vec<CmRecord>,
    /// `ln h(D)` against `ln |D|`.
    pub class_number_fit: BoundFit,
    /// `ln max h(tau)` against `ln |D|`.
    pub height_fit: BoundFit,
    pub total_points: usize,
    /// Every point passed the membership test.
    pub all_in_domain: bool,
}

pub fn cm_record(d: i64) -> Result<CmRecord> {
    let forms = reduced_forms(d)?;
    let points = forms.iter().map(cm_point).collect::<Result<Vec<_>>>()?;
    let max_height = points.iter().map(|p| p.norm_h().value()).fold(1.0, f64::max);
    Ok(CmRecord {
        d,
        class_number: forms.len(),
        forms,
        points,
        max_height,
    })
}

/// Records for every discriminant `-bound <= D <= -3`, including
/// non-fundamental ones, ordered by `|D|`.
pub fn cm_survey(bound: i64) -> Result<CmSurvey> {
    if bound < 3 {
        return Err(Error::Precondition(format!("survey bound {bound}; need at least 3")));
    }
    let ds: Vec<i64> = (3..=bound).map(|n| -n).filter(|d| matches!(d.rem_euclid(4), 0 | 1)).collect();
    let records = ds.par_iter().map(|&d| cm_record(d)).collect::<Result<Vec<_>>>()?;
    let all_in_domain = records
        .par_iter()
        .all(|r| r.points.iter().all(|p| in_fundamental_domain(p, 1e-9).in_domain));
    let total_points = records.iter().map(|r| r.points.len()).sum();
    let xs: Vec<f64> = records.iter().map(|r| -(r.d as f64)).collect();
    let hs: Vec<f64> = records.iter().map(|r| r.class_number as f64).collect();
    let ms: Vec<f64> = records.iter().map(|r| r.max_height).collect();
    Ok(CmSurvey {
        class_number_fit: fit_loglog(&xs, &hs)?,
        height_fit: fit_loglog(&xs, &ms)?,
        records,
        total_points,
        all_in_domain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(v: &[(i64, i64, i64)]) -> Vec<QuadraticForm> {
        v.iter().map(|&(a, b, c)| QuadraticForm::new(a, b, c)).collect()
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(reduced_forms(-4).unwrap(), forms(&[(1, 0, 1)]));
        assert_eq!(reduced_forms(-3).unwrap(), forms(&[(1, 1, 1)]));
        assert_eq!(reduced_forms(-23).unwrap(), forms(&[(1, 1, 6), (2, -1, 3), (2, 1, 3)]));
        assert_eq!(class_number(-23).unwrap(), 3);
        // non-fundamental: D = -12 has (1,0,3) only, (2,2,2) is not primitive
        assert_eq!(reduced_forms(-12).unwrap(), forms(&[(1, 0, 3)]));
    }

    #[test]
    fn bad_discriminants() {
        for d in [0, 5, -1, -2, -5, -6] {
            assert!(matches!(reduced_forms(d), Err(Error::BadDiscriminant(_))), "{d}");
        }
    }

    #[test]
    fn cm_point_examples() {
        let i = cm_point(&QuadraticForm::new(1, 0, 1)).unwrap();
        assert_eq!((i.x()[(0, 0)], i.y()[(0, 0)]), (0.0, 1.0));
        let rho = cm_point(&QuadraticForm::new(1, 1, 1)).unwrap();
        assert_eq!(rho.x()[(0, 0)], -0.5);
        assert!((rho.y()[(0, 0)] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let p = cm_point(&QuadraticForm::new(2, 1, 3)).unwrap();
        assert!((p.y()[(0, 0)] - 23f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(in_fundamental_domain(&p, 1e-9).in_domain);
        assert!(matches!(
            cm_point(&QuadraticForm::new(3, 1, 2)),
            Err(Error::NotReduced { .. })
        ));
    }

    #[test]
    fn gauss_reduction() {
        let f = QuadraticForm::new(2, 1, 3);
        let g = f.transform([[2, 1], [1, 1]]).transform([[1, -3], [0, 1]]);
        assert_ne!(g, f);
        assert_eq!(g.discriminant(), -23);
        assert_eq!(g.reduce().unwrap(), f);
        assert_eq!(QuadraticForm::new(1, -1, 1).reduce().unwrap(), QuadraticForm::new(1, 1, 1));
        assert_eq!(QuadraticForm::new(2, -1, 2).reduce().unwrap(), QuadraticForm::new(2, 1, 2));
    }

    #[test]
    fn small_survey() {
        let s = cm_survey(4).unwrap();
        let ds: Vec<i64> = s.records.iter().map(|r| r.d).collect();
        assert_eq!(ds, vec![-3, -4]);
        assert_eq!(s.total_points, 2);
        assert!(s.all_in_domain);
        assert!(cm_survey(2).is_err());
    }
}
