//! JSON literal formats.
//!
//! * matrix: `{"g": 1, "entries": ["1", "1", "1", "2"]}`, row-major integer
//!   strings (plain JSON integers are accepted too);
//! * point: `{"g": 1, "X": ["0.6"], "Y": ["0.2"], "precision": 128}`;
//! * chart: `{"g": 1, "entries": [[["0", "0"], ["1", "0"]]], "domain":
//!   {"re": ["-inf", "inf"], "im": ["0", "inf"]}}`, one coefficient list
//!   (ascending degree, `[re, im]` pairs) per matrix entry, row-major; a disk
//!   domain is `{"center": ["0", "1"], "radius": "0.5"}`.

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chart::{ChartDomain, CurveChart, Poly};
use crate::error::{Error, Result};
use crate::geometry::{SiegelPoint, DEFAULT_PRECISION};
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::symplectic::SymplecticMatrix;

/// A number written either as a JSON string or a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    Text(String),
    Int(i64),
    Float(f64),
}

impl NumText {
    fn parse<T: FromStr>(&self, what: &str) -> Result<T> {
        let s = match self {
            NumText::Text(s) => s.trim().to_string(),
            NumText::Int(v) => v.to_string(),
            NumText::Float(v) => v.to_string(),
        };
        s.parse()
            .map_err(|_| Error::Malformed(format!("cannot read {what} from {s:?}")))
    }

    fn real(&self) -> Result<f64> {
        self.parse::<f64>("a decimal")
    }
}

fn text<T: Display>(v: T) -> NumText {
    NumText::Text(v.to_string())
}

fn square<T>(entries: Vec<T>, n: usize, what: &str) -> Result<Mat<T>> {
    if entries.len() != n * n {
        return Err(Error::Malformed(format!(
            "{what}: {} entries, expected {}",
            entries.len(),
            n * n
        )));
    }
    Ok(Mat::from_vec(n, n, entries))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub g: usize,
    pub entries: Vec<NumText>,
}

impl MatrixLiteral {
    pub fn from_matrix<T: Scalar + Display>(m: &SymplecticMatrix<T>) -> Self {
        Self {
            g: m.genus(),
            entries: m.entries().iter().map(text).collect(),
        }
    }

    pub fn to_symplectic(&self) -> Result<SymplecticMatrix<BigInt>> {
        if self.g == 0 {
            return Err(Error::Malformed("genus must be positive".into()));
        }
        let vals = self
            .entries
            .iter()
            .map(|e| e.parse::<BigInt>("an integer"))
            .collect::<Result<Vec<_>>>()?;
        SymplecticMatrix::new(square(vals, 2 * self.g, "matrix")?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointLiteral {
    pub g: usize,
    #[serde(rename = "X")]
    pub x: Vec<NumText>,
    #[serde(rename = "Y")]
    pub y: Vec<NumText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

impl PointLiteral {
    pub fn from_point(p: &SiegelPoint<f64>) -> Self {
        Self {
            g: p.genus(),
            x: p.x().iter().map(text).collect(),
            y: p.y().iter().map(text).collect(),
            precision: Some(p.precision()),
        }
    }

    pub fn to_point(&self) -> Result<SiegelPoint<f64>> {
        let read = |v: &[NumText]| v.iter().map(NumText::real).collect::<Result<Vec<_>>>();
        let x = square(read(&self.x)?, self.g, "X")?;
        let y = square(read(&self.y)?, self.g, "Y")?;
        Ok(SiegelPoint::new(x, y)?.with_precision(self.precision.unwrap_or(DEFAULT_PRECISION)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainLiteral {
    Rect { re: [NumText; 2], im: [NumText; 2] },
    Disk { center: [NumText; 2], radius: NumText },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartLiteral {
    pub g: usize,
    pub entries: Vec<Vec<[NumText; 2]>>,
    pub domain: DomainLiteral,
}

impl ChartLiteral {
    pub fn from_chart(c: &CurveChart) -> Self {
        let entries = c
            .entries()
            .iter()
            .map(|p| p.coeffs().iter().map(|z| [text(z.re), text(z.im)]).collect())
            .collect();
        let domain = match c.domain() {
            ChartDomain::Rect { re, im } => DomainLiteral::Rect {
                re: [text(re.0), text(re.1)],
                im: [text(im.0), text(im.1)],
            },
            ChartDomain::Disk { center, radius } => DomainLiteral::Disk {
                center: [text(center.re), text(center.im)],
                radius: text(radius),
            },
        };
        Self {
            g: c.genus(),
            entries,
            domain,
        }
    }

    pub fn to_chart(&self) -> Result<CurveChart> {
        let polys = self
            .entries
            .iter()
            .map(|coeffs| {
                coeffs
                    .iter()
                    .map(|[re, im]| Ok(Complex64::new(re.real()?, im.real()?)))
                    .collect::<Result<Vec<_>>>()
                    .map(Poly::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let domain = match &self.domain {
            DomainLiteral::Rect { re, im } => ChartDomain::Rect {
                re: (re[0].real()?, re[1].real()?),
                im: (im[0].real()?, im[1].real()?),
            },
            DomainLiteral::Disk { center, radius } => ChartDomain::Disk {
                center: Complex64::new(center[0].real()?, center[1].real()?),
                radius: radius.real()?,
            },
        };
        CurveChart::new(self.g, polys, domain)
    }
}

macro_rules! via_literal {
    ($ty:ty, $lit:ty, $from:path, $to:ident) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                $from(self).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                <$lit>::deserialize(d)?.$to().map_err(D::Error::custom)
            }
        }
    };
}

via_literal!(SiegelPoint<f64>, PointLiteral, PointLiteral::from_point, to_point);
via_literal!(CurveChart, ChartLiteral, ChartLiteral::from_chart, to_chart);
via_literal!(SymplecticMatrix<BigInt>, MatrixLiteral, MatrixLiteral::from_matrix, to_symplectic);

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}
