//! Height-bounded enumeration of `Sp_2g(Z)` and the counting function
//! `N(A, T) = #{M in A : H(M) <= T}`.
//!
//! Rows `r_0, ..., r_{2g-1}` of `M` are chosen in order; row `k` must satisfy
//! the `k` linear conditions `r_i^t J r_k = J_ik`, which are solved for `k`
//! pivot coordinates by Cramer's rule while the remaining coordinates range
//! over the box. Partial row sets that are linearly dependent are pruned.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{CurveChart, Poly};
use crate::error::{Error, Result};
use crate::fit::{fit_loglog, BoundFit};
use crate::geometry::{act, SiegelPoint};
use crate::matrix::Mat;
use crate::symplectic::SymplecticMatrix;

/// Largest admissible height bound per genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBudget {
    pub g1_max_t: i64,
    pub g2_max_t: i64,
}

impl Default for LatticeBudget {
    fn default() -> Self {
        Self {
            g1_max_t: 200,
            g2_max_t: 6,
        }
    }
}

impl LatticeBudget {
    pub fn check(&self, g: usize, t: i64) -> Result<()> {
        if t < 1 {
            return Err(Error::Precondition(format!("height bound T = {t}; need T >= 1")));
        }
        let max = match g {
            1 => self.g1_max_t,
            2 => self.g2_max_t,
            _ => return Err(Error::UnsupportedGenus(g)),
        };
        if t > max {
            return Err(Error::BudgetExceeded {
                budget: max as usize,
                diagnostics: format!(
                    "g = {g}, T = {t}: about {:.3e} search nodes predicted",
                    predicted_nodes(g, t)
                ),
            });
        }
        Ok(())
    }
}

/// Upper estimate of the number of candidate vectors visited.
pub fn predicted_nodes(g: usize, t: i64) -> f64 {
    let side = (2 * t + 1) as f64;
    let n = 2 * g;
    // first row over the full box, then each later row has one fewer free
    // coordinate; assume a 1/side survival rate per imposed condition
    let mut nodes = side.powi(n as i32);
    let mut alive = nodes;
    for k in 1..n {
        let visited = alive * side.powi((n - k) as i32);
        nodes += visited;
        alive = visited / side;
    }
    nodes
}

const MAXN: usize = 4;
type Row = [i64; MAXN];

/// `(r^t J)_c`, so that `r^t J x = sum_c w_c x_c`.
fn omega_row(r: &Row, g: usize) -> Row {
    let mut w = [0; MAXN];
    for c in 0..2 * g {
        w[c] = if c >= g { r[c - g] } else { -r[c + g] };
    }
    w
}

fn det_small(m: &[[i128; 3]; 3], k: usize) -> i128 {
    match k {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

fn adjugate_small(m: &[[i128; 3]; 3], k: usize) -> [[i128; 3]; 3] {
    let mut adj = [[0; 3]; 3];
    if k == 1 {
        adj[0][0] = 1;
        return adj;
    }
    for i in 0..k {
        for j in 0..k {
            let mut minor = [[0; 3]; 3];
            let rows = (0..k).filter(|&r| r != j);
            for (a, r) in rows.enumerate() {
                for (b, c) in (0..k).filter(|&c| c != i).enumerate() {
                    minor[a][b] = m[r][c];
                }
            }
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * det_small(&minor, k - 1);
        }
    }
    adj
}

/// Linear system `w_i . x = b_i` for the next row, solved for `k` pivot
/// coordinates.
struct Stage {
    k: usize,
    n: usize,
    w: [Row; 3],
    b: [i64; 3],
    pivot: [usize; 3],
    free: [usize; MAXN],
    adj: [[i128; 3]; 3],
    det: i128,
}

impl Stage {
    /// `None` when the previous rows are linearly dependent.
    fn new(rows: &[Row], g: usize) -> Option<Self> {
        let n = 2 * g;
        let k = rows.len();
        let mut w = [[0; MAXN]; 3];
        let mut b = [0; 3];
        for (i, r) in rows.iter().enumerate() {
            w[i] = omega_row(r, g);
            b[i] = i64::from(k == i + g);
        }
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let mut pivot = [0; 3];
            let mut free = [0; MAXN];
            let (mut np, mut nf) = (0, 0);
            for c in 0..n {
                if mask & (1 << c) != 0 {
                    pivot[np] = c;
                    np += 1;
                } else {
                    free[nf] = c;
                    nf += 1;
                }
            }
            let mut m = [[0i128; 3]; 3];
            for i in 0..k {
                for j in 0..k {
                    m[i][j] = w[i][pivot[j]] as i128;
                }
            }
            let det = det_small(&m, k);
            if det != 0 {
                return Some(Stage {
                    k,
                    n,
                    w,
                    b,
                    pivot,
                    free,
                    adj: adjugate_small(&m, k),
                    det,
                });
            }
        }
        None
    }

    /// All solutions in the box, lexicographically sorted; the zero vector
    /// is excluded.
    fn solutions(&self, t: i64, out: &mut Vec<Row>) {
        out.clear();
        let nfree = self.n - self.k;
        let mut x = [0i64; MAXN];
        for f in 0..nfree {
            x[self.free[f]] = -t;
        }
        'odometer: loop {
            let mut ok = true;
            let mut rhs = [0i128; 3];
            for i in 0..self.k {
                let mut acc = self.b[i] as i128;
                for f in 0..nfree {
                    let c = self.free[f];
                    acc -= self.w[i][c] as i128 * x[c] as i128;
                }
                rhs[i] = acc;
            }
            for p in 0..self.k {
                let mut num = 0i128;
                for j in 0..self.k {
                    num += self.adj[p][j] * rhs[j];
                }
                if num % self.det != 0 {
                    ok = false;
                    break;
                }
                let v = num / self.det;
                if v.abs() > t as i128 {
                    ok = false;
                    break;
                }
                x[self.pivot[p]] = v as i64;
            }
            if ok && x[..self.n].iter().any(|&v| v != 0) {
                out.push(x);
            }
            let mut pos = nfree;
            loop {
                if pos == 0 {
                    break 'odometer;
                }
                pos -= 1;
                let c = self.free[pos];
                if x[c] < t {
                    x[c] += 1;
                    for f in pos + 1..nfree {
                        x[self.free[f]] = -t;
                    }
                    break;
                }
            }
        }
        if self.k > 0 {
            out.sort_unstable();
        }
    }
}

fn extend<F: FnMut(&[Row])>(rows: &mut [Row; MAXN], k: usize, g: usize, t: i64, bufs: &mut [Vec<Row>], visit: &mut F) {
    let n = 2 * g;
    let Some(stage) = Stage::new(&rows[..k], g) else {
        return;
    };
    let mut cands = std::mem::take(&mut bufs[k]);
    stage.solutions(t, &mut cands);
    for c in &cands {
        rows[k] = *c;
        if k + 1 == n {
            visit(&rows[..n]);
        } else {
            extend(rows, k + 1, g, t, bufs, visit);
        }
    }
    bufs[k] = cands;
}

fn first_rows(g: usize, t: i64) -> Vec<Row> {
    let mut out = Vec::new();
    Stage::new(&[], g).expect("empty system").solutions(t, &mut out);
    out
}

/// Depth-first search below a fixed first row.
fn visit_partition<F: FnMut(&[Row])>(r0: Row, g: usize, t: i64, visit: &mut F) {
    let mut rows = [[0; MAXN]; MAXN];
    rows[0] = r0;
    let mut bufs = vec![Vec::new(); MAXN];
    extend(&mut rows, 1, g, t, &mut bufs, visit);
}

fn to_matrix(rows: &[Row], g: usize) -> SymplecticMatrix<i64> {
    let n = 2 * g;
    let flat: Vec<i64> = rows.iter().flat_map(|r| r[..n].iter().copied()).collect();
    SymplecticMatrix::new(Mat::from_vec(n, n, flat)).expect("enumerated rows satisfy the symplectic relations")
}

/// Every `M` in `Sp_2g(Z)` with all `|m_ij| <= T`, once each, ordered
/// lexicographically by flattened entries.
pub fn enumerate_symplectic(g: usize, t: i64, budget: &LatticeBudget) -> Result<Vec<SymplecticMatrix<i64>>> {
    budget.check(g, t)?;
    let parts: Vec<Vec<SymplecticMatrix<i64>>> = first_rows(g, t)
        .into_par_iter()
        .map(|r0| {
            let mut out = Vec::new();
            visit_partition(r0, g, t, &mut |rows| out.push(to_matrix(rows, g)));
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Registered matrix predicates.
#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    All,
    /// `M` passes when the translate `M.C` of the chart image passes through
    /// the base point `p0` of the fundamental domain, i.e. `M^{-1} p0` lies
    /// on `C`. An exact sufficient condition for `M.C` to meet `S_g`.
    TranslateMeetsDomain { chart: CurveChart },
}

pub const PREDICATE_NAMES: [&str; 2] = ["all", "translate-meets-domain"];

impl Predicate {
    pub fn from_name(name: &str, chart: Option<CurveChart>) -> Result<Self> {
        match name {
            "all" => Ok(Predicate::All),
            "translate-meets-domain" => Ok(Predicate::TranslateMeetsDomain {
                chart: chart.unwrap_or_else(CurveChart::identity),
            }),
            other => Err(Error::UnknownPredicate(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Predicate::All => PREDICATE_NAMES[0],
            Predicate::TranslateMeetsDomain { .. } => PREDICATE_NAMES[1],
        }
    }

    fn genus(&self) -> Option<usize> {
        match self {
            Predicate::All => None,
            Predicate::TranslateMeetsDomain { chart } => Some(chart.genus()),
        }
    }
}

/// Interior point of `S_g` used by the translate predicate.
pub fn base_point(g: usize) -> SiegelPoint<f64> {
    let x = Mat::from_fn(g, g, |i, j| if i == j { 0.1 } else { 0.05 });
    let y = Mat::from_fn(g, g, |i, j| if i == j { 1.3 + 0.1 * i as f64 } else { 0.2 });
    SiegelPoint::new(x, y).expect("positive definite")
}

/// Whether `w` lies on the chart image over its domain.
pub fn chart_passes_through(chart: &CurveChart, w: &SiegelPoint<f64>) -> bool {
    let wz = w.z();
    let g = chart.genus();
    let scale = 1.0 + wz.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = 1e-8 * scale;
    let matches = |t: Complex64| {
        chart.domain().contains(t)
            && (0..g).all(|i| (0..g).all(|j| (chart.entries()[(i, j)].eval(t) - wz[(i, j)]).norm() <= tol))
    };
    let entries = chart.entries();
    let Some((i, j)) = (0..g)
        .flat_map(|i| (i..g).map(move |j| (i, j)))
        .find(|&(i, j)| entries[(i, j)].degree() > 0)
    else {
        return matches(Complex64::new(0.0, 0.0));
    };
    let mut c = entries[(i, j)].coeffs().to_vec();
    c[0] -= wz[(i, j)];
    Poly::new(c).roots().into_iter().any(matches)
}

fn passes(pred: &Predicate, m: &SymplecticMatrix<i64>, p0: Option<&SiegelPoint<f64>>) -> bool {
    match pred {
        Predicate::All => true,
        Predicate::TranslateMeetsDomain { chart } => {
            let p0 = p0.expect("base point");
            act(&m.inverse(), p0).is_ok_and(|w| chart_passes_through(chart, &w))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountQuery {
    pub g: usize,
    pub t: i64,
    pub predicate: Predicate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "T")]
    pub t: i64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub g: usize,
    pub predicate: String,
    pub rows: Vec<CountRow>,
    /// Present when there are at least three rows.
    pub fit: Option<BoundFit>,
}

/// `N(A, T)` for the predicate-defined set `A`.
pub fn count_filtered(query: &CountQuery, budget: &LatticeBudget) -> Result<CountSeries> {
    let count = count_one(query.g, query.t, &query.predicate, budget)?;
    Ok(CountSeries {
        g: query.g,
        predicate: query.predicate.name().to_string(),
        rows: vec![CountRow { t: query.t, count }],
        fit: None,
    })
}

fn count_one(g: usize, t: i64, pred: &Predicate, budget: &LatticeBudget) -> Result<u64> {
    budget.check(g, t)?;
    if let Some(cg) = pred.genus() {
        if cg != g {
            return Err(Error::GenusMismatch { left: g, right: cg });
        }
    }
    let p0 = matches!(pred, Predicate::TranslateMeetsDomain { .. }).then(|| base_point(g));
    let total = first_rows(g, t)
        .into_par_iter()
        .map(|r0| {
            let mut n = 0u64;
            visit_partition(r0, g, t, &mut |rows| {
                if matches!(pred, Predicate::All) || passes(pred, &to_matrix(rows, g), p0.as_ref()) {
                    n += 1;
                }
            });
            n
        })
        .sum();
    Ok(total)
}

/// Counts for several height bounds plus the growth fit.
pub fn count_series(g: usize, ts: &[i64], pred: &Predicate, budget: &LatticeBudget) -> Result<CountSeries> {
    let rows = ts
        .iter()
        .map(|&t| Ok(CountRow { t, count: count_one(g, t, pred, budget)? }))
        .collect::<Result<Vec<_>>>()?;
    let fit = if rows.len() >= 3 { Some(growth_fit(&rows)?) } else { None };
    Ok(CountSeries {
        g,
        predicate: pred.name().to_string(),
        rows,
        fit,
    })
}

/// Log-log fit of count against `T`; needs three rows with distinct `T`
/// and positive counts.
pub fn growth_fit(rows: &[CountRow]) -> Result<BoundFit> {
    if rows.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} rows; need at least 3", rows.len())));
    }
    let mut ts: Vec<i64> = rows.iter().map(|r| r.t).collect();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() != rows.len() {
        return Err(Error::DegenerateFit("repeated height bound".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.t as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
    fit_loglog(&xs, &ys)
}
