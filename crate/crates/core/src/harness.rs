//! The check suite: every quantitative inequality exercised at desk scale,
//! one scoreboard row per check, with constants frozen on a calibration
//! seed and asserted on fresh seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartDomain, CurveChart, Poly};
use crate::cm::cm_survey;
use crate::domain::diagonal_ratio;
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::geometry::{act, symplectic_identity_residual, transformed_imag_inverse, SiegelPoint};
use crate::integrate::SamplingConfig;
use crate::io;
use crate::lattice::{count_series, LatticeBudget, Predicate};
use crate::metric::{comparison_bound_check, comparison_sup_ratio};
use crate::reduction::{reduction_height_rows, siegel_reduce, ReduceConfig, ReductionResult};
use crate::sample;
use crate::symplectic::SymplecticMatrix;
use crate::volume::{boundary_volume_profile, curve_volume_in_domain};

/// Check ids with their formula anchors, in execution order.
pub const CHECKS: [(&str, &str); 10] = [
    ("01-group-law", "(AZ+B)(CZ+D)^{-1}"),
    ("02-identity-star", "(C\\bar{Z}+D)^t(AZ+B)-(A\\bar{Z}+B)^t(CZ+D)=2iY"),
    ("03-diagonal-ratio", "|Y|\\leq\\prod_{i=1}^g y_{ii} \\leq c_g|Y|"),
    ("04-height-bounds", "h(M_1M_2)\\prec h(M_1)h(M_2)"),
    ("05-reduction-height", "h(\\gamma_Z)\\prec h(Z)"),
    (
        "06-metric-comparison",
        "Tr(Y^{-1}dZY^{-1}d\\bar{Z})\\leq c(g)\\sum_{i,j}|dz_{ij}|^2/(y_{ii}y_{jj})",
    ),
    ("07-degree-sweep", "\\int_{C\\cap S_g} dC \\ll k"),
    ("08-boundary-growth", "M\\prec\\int_{C_M}dC"),
    ("09-lattice-growth", "T\\prec N(X,T)"),
    ("10-cm-survey", "H(Z)\\prec|\\textrm{Disc}(R_x)|"),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Random `(M1, M2, Z)` triples for the group-law and identity checks.
    pub group_trials: usize,
    pub word_length: usize,
    pub ratio_samples_g2: usize,
    pub ratio_samples_g3: usize,
    pub height_pairs: usize,
    pub survey_samples: usize,
    /// Boundary survey points have `Y` scaled by `10^{-u}`, `u <= depth`.
    pub survey_depth: f64,
    /// In-domain genus-2 samples for the metric comparison.
    pub comparison_samples: usize,
    pub sweep_degrees: usize,
    pub volume_rel_se: f64,
    pub profile_rel_se: f64,
    pub profile_heights: Vec<f64>,
    pub count_heights: Vec<i64>,
    pub cm_bound: i64,
    pub max_samples: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            group_trials: 1000,
            word_length: 5,
            ratio_samples_g2: 2000,
            ratio_samples_g3: 200,
            height_pairs: 1000,
            survey_samples: 300,
            survey_depth: 4.0,
            comparison_samples: 10_000,
            sweep_degrees: 6,
            volume_rel_se: 1e-3,
            profile_rel_se: 5e-3,
            profile_heights: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            count_heights: vec![10, 20, 40, 80],
            cm_bound: 10_000,
            max_samples: 1 << 23,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub genera: Vec<usize>,
    pub action_tol: f64,
    pub membership_tol: f64,
    pub fit_tolerance: f64,
    pub budgets: Budgets,
    /// Output directory for reports.
    pub out: Option<PathBuf>,
    /// Frozen constants file; the checked-in one when absent.
    pub constants: Option<PathBuf>,
    /// Record wall-clock time per row (makes reports seed-irreproducible).
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            genera: vec![1, 2, 3],
            action_tol: 1e-9,
            membership_tol: 1e-9,
            fit_tolerance: 0.1,
            budgets: Budgets::default(),
            out: None,
            constants: None,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.genera.is_empty() || self.genera.iter().any(|&g| !(1..=3).contains(&g)) {
            return Err(Error::Precondition(format!(
                "genus list {:?} must be nonempty and within 1..=3",
                self.genera
            )));
        }
        // action_tol = 0 is accepted so the group-law rows can be forced to fail
        let tols = [
            ("action_tol", self.action_tol, true),
            ("membership_tol", self.membership_tol, false),
            ("fit_tolerance", self.fit_tolerance, false),
            ("volume_rel_se", self.budgets.volume_rel_se, false),
            ("profile_rel_se", self.budgets.profile_rel_se, false),
        ];
        for (name, v, zero_ok) in tols {
            if !v.is_finite() || v < 0.0 || (v == 0.0 && !zero_ok) {
                return Err(Error::Precondition(format!("{name} = {v} must be positive")));
            }
        }
        let b = &self.budgets;
        if b.group_trials == 0 || b.word_length == 0 || b.height_pairs < 3 || b.survey_samples < 3 {
            return Err(Error::Precondition("sample budgets must be positive (fits need 3)".into()));
        }
        if b.profile_heights.len() < 3 || b.count_heights.len() < 3 {
            return Err(Error::Precondition("growth fits need at least 3 heights".into()));
        }
        Ok(())
    }

    fn has(&self, g: usize) -> bool {
        self.genera.contains(&g)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn sampling(&self, salt: u64, target: f64) -> SamplingConfig {
        SamplingConfig {
            seed: self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt,
            target_rel_se: target,
            max_samples: self.budgets.max_samples,
            ..Default::default()
        }
    }
}

/// Constants fitted on the calibration seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenConstants {
    pub calibration_seed: u64,
    /// `c_g` bounding `prod y_ii / |Y|` on reduced points, keyed by genus.
    pub diagonal_ratio: BTreeMap<usize, f64>,
    /// `c(g)` of the metric comparison, keyed by genus.
    pub metric_comparison: BTreeMap<usize, f64>,
    /// Bound on `vol(C_k ∩ S_1) / k` over the degree sweep.
    pub degree_sweep: f64,
    /// Bound on the slope of `ln H(gamma_Z)` against `ln h(Z)`.
    pub reduction_exponent: f64,
}

const BUILTIN_CONSTANTS: &str = include_str!("../data/frozen_constants.json");

impl FrozenConstants {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN_CONSTANTS).expect("checked-in constants parse")
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => io::read_json(p),
            None => Ok(Self::builtin()),
        }
    }
}

/// Smallest number with three significant figures that is `>= x`.
pub fn round_up_3sf(x: f64) -> f64 {
    if !(x.is_finite() && x > 0.0) {
        return x;
    }
    let e = x.log10().floor() as i32 - 2;
    let scale = 10f64.powi(e);
    let mut m = (x / scale).ceil();
    if (m - 1.0) * scale >= x {
        m -= 1.0;
    }
    let digits = (-e).max(0) as usize;
    let v: f64 = format!("{:.*}", digits, m * scale).parse().expect("formatted float");
    if v < x {
        format!("{:.*}", digits, (m + 1.0) * scale).parse().expect("formatted float")
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Failed only on genus-3 points, where domain membership is heuristic.
    Heuristic,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub constants: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scoreboard {
    pub seed: u64,
    pub rows: Vec<ScoreRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(Error::Malformed(format!("unknown report format {other:?}"))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Markdown => "md",
        }
    }
}

impl Scoreboard {
    /// No row failed outright (heuristic rows do not count).
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn row(&self, id: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        io::to_json_string(self)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "anchor", "status", "constants", "diagnostics", "runtime_ms"])
            .map_err(csv_error)?;
        for r in &self.rows {
            let constants = r
                .constants
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            let runtime = r.runtime_ms.map(|t| t.to_string()).unwrap_or_default();
            w.write_record([
                r.id.as_str(),
                r.anchor.as_str(),
                r.status.as_str(),
                &constants,
                &r.diagnostics.join("; "),
                &runtime,
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("# Scoreboard (seed {})\n\n", self.seed);
        s.push_str("| check | anchor | status | constants | diagnostics |\n");
        s.push_str("|---|---|---|---|---|\n");
        for r in &self.rows {
            let constants = r
                .constants
                .iter()
                .map(|(k, v)| format!("{k} = {}", short(*v)))
                .collect::<Vec<_>>()
                .join("<br>");
            let diag = r.diagnostics.join("<br>").replace('|', "\\|");
            let _ = writeln!(
                s,
                "| {} | `{}` | {} | {} | {} |",
                r.id,
                r.anchor.replace('|', "\\|"),
                r.status.as_str(),
                constants,
                diag
            );
        }
        s
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => Ok(self.to_markdown()),
        }
    }

    pub fn export(&self, path: &Path, format: ReportFormat) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }
}

fn short(v: f64) -> String {
    let a = v.abs();
    if v == v.trunc() && a < 1e15 {
        format!("{v}")
    } else if (1e-3..1e6).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').to_string()
    } else {
        format!("{v:.3e}")
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Malformed(format!("csv: {e}"))
}

#[derive(Default)]
struct Check {
    constants: BTreeMap<String, f64>,
    notes: Vec<String>,
    failed: bool,
    failed_heuristic: bool,
}

impl Check {
    fn constant(&mut self, key: impl Into<String>, v: f64) {
        let key = key.into();
        if v.is_finite() {
            self.constants.insert(key, v);
        } else {
            self.notes.push(format!("{key} is not finite ({v})"));
            self.failed = true;
        }
    }

    fn require(&mut self, ok: bool, heuristic: bool, note: impl FnOnce() -> String) {
        if ok {
            return;
        }
        self.notes.push(note());
        if heuristic {
            self.failed_heuristic = true;
        } else {
            self.failed = true;
        }
    }

    fn status(&self) -> Status {
        if self.failed {
            Status::Fail
        } else if self.failed_heuristic {
            Status::Heuristic
        } else {
            Status::Pass
        }
    }
}

fn max_abs_diff(a: &SiegelPoint<f64>, b: &SiegelPoint<f64>) -> f64 {
    a.z().sub(&b.z()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

type Triple = (SymplecticMatrix<i64>, SymplecticMatrix<i64>, SiegelPoint<f64>);

fn triples(cfg: &SuiteConfig, stream: u64) -> Vec<Triple> {
    let mut rng = cfg.rng(stream);
    let len = cfg.budgets.word_length;
    (0..cfg.budgets.group_trials)
        .map(|i| {
            let g = cfg.genera[i % cfg.genera.len()];
            let l1 = rng.gen_range(1..=len);
            let l2 = rng.gen_range(1..=len);
            (sample::word(g, l1, &mut rng), sample::word(g, l2, &mut rng), sample::point(g, &mut rng))
        })
        .collect()
}

fn per_genus_max(cfg: &SuiteConfig, c: &mut Check, name: &str, values: &[(usize, f64)]) -> f64 {
    let mut all = 0.0f64;
    for &g in &cfg.genera {
        let m = values.iter().filter(|v| v.0 == g).map(|v| v.1).fold(0.0, f64::max);
        c.constant(format!("{name}_g{g}"), m);
        all = all.max(m);
    }
    all
}

fn group_law(cfg: &SuiteConfig) -> Result<Check> {
    let data = triples(cfg, 1);
    let rows: Vec<(usize, bool, f64)> = data
        .par_iter()
        .map(|(m1, m2, z)| {
            let g = z.genus();
            let m12 = m1.mul(m2)?;
            let exact = m12.mul(m1)? == m1.mul(&m2.mul(m1)?)?
                && m1.mul(&m1.inverse())?.is_identity()
                && m1.inverse().inverse() == *m1
                && m1.transpose().residual() == 0;
            let lhs = act(&m12, z)?;
            let rhs = act(m1, &act(m2, z)?)?;
            Ok((g, exact, max_abs_diff(&lhs, &rhs)))
        })
        .collect::<Result<_>>()?;
    let mut c = Check::default();
    let bad = rows.iter().filter(|r| !r.1).count();
    c.require(bad == 0, false, || format!("{bad} exact group-law failures"));
    let res: Vec<(usize, f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
    let worst = per_genus_max(cfg, &mut c, "action_residual", &res);
    c.require(worst <= cfg.action_tol, false, || {
        format!("action residual {worst:e} exceeds action_tol {:e}", cfg.action_tol)
    });
    Ok(c)
}

fn identity_star(cfg: &SuiteConfig) -> Result<Check> {
    let data = triples(cfg, 2);
    let rows: Vec<(usize, f64, f64)> = data
        .par_iter()
        .map(|(m, _, z)| {
            let id = symplectic_identity_residual(m, z)?;
            let w = act(m, z)?;
            let direct = w.y().inverse().expect("positive definite");
            let inv = direct.sub(&transformed_imag_inverse(m, z)?).max_abs();
            Ok((z.genus(), id, inv))
        })
        .collect::<Result<_>>()?;
    let mut c = Check::default();
    let id: Vec<(usize, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let inv: Vec<(usize, f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
    let a = per_genus_max(cfg, &mut c, "identity_residual", &id);
    let b = per_genus_max(cfg, &mut c, "imag_inverse_residual", &inv);
    c.require(a <= cfg.action_tol, false, || {
        format!("identity residual {a:e} exceeds action_tol {:e}", cfg.action_tol)
    });
    c.require(b <= cfg.action_tol, false, || {
        format!("imaginary-part inverse residual {b:e} exceeds action_tol {:e}", cfg.action_tol)
    });
    Ok(c)
}

fn reduced_batch(cfg: &SuiteConfig, g: usize, n: usize, stream: u64) -> Result<Vec<ReductionResult<f64>>> {
    let mut rng = cfg.rng(stream);
    let points: Vec<SiegelPoint<f64>> = (0..n).map(|_| sample::point(g, &mut rng)).collect();
    let rc = ReduceConfig {
        tol: cfg.membership_tol,
        ..Default::default()
    };
    points.par_iter().map(|z| siegel_reduce(z, &rc)).collect()
}

fn ratio_samples(cfg: &SuiteConfig, g: usize) -> usize {
    if g == 2 {
        cfg.budgets.ratio_samples_g2
    } else {
        cfg.budgets.ratio_samples_g3
    }
}

fn frozen(map: &BTreeMap<usize, f64>, g: usize) -> Result<f64> {
    map.get(&g)
        .copied()
        .ok_or_else(|| Error::Precondition(format!("no frozen constant for genus {g}")))
}

fn diagonal_ratio_check(cfg: &SuiteConfig, k: &FrozenConstants) -> Result<Check> {
    let mut c = Check::default();
    for g in [2, 3].into_iter().filter(|&g| cfg.has(g)) {
        let cg = frozen(&k.diagonal_ratio, g)?;
        let batch = reduced_batch(cfg, g, ratio_samples(cfg, g), 30 + g as u64)?;
        let heuristic = g == 3;
        let outside = batch.iter().filter(|r| !r.report.in_domain).count();
        c.require(outside == 0, heuristic, || format!("g={g}: {outside} reduced points fail membership"));
        let ratios: Vec<f64> = batch.iter().map(|r| diagonal_ratio(&r.reduced_point)).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        c.constant(format!("min_ratio_g{g}"), lo);
        c.constant(format!("max_ratio_g{g}"), hi);
        c.constant(format!("frozen_c_g{g}"), cg);
        c.require(lo >= 1.0 - 1e-12, false, || format!("g={g}: ratio {lo} below 1"));
        c.require(hi <= cg, heuristic, || format!("g={g}: ratio {hi} exceeds frozen {cg}"));
    }
    Ok(c)
}

fn height_bounds(cfg: &SuiteConfig) -> Result<Check> {
    let mut rng = cfg.rng(4);
    let len = cfg.budgets.word_length;
    let data: Vec<Triple> = (0..cfg.budgets.height_pairs)
        .map(|i| {
            let g = cfg.genera[i % cfg.genera.len()];
            let l1 = rng.gen_range(1..=2 * len);
            let l2 = rng.gen_range(1..=2 * len);
            (sample::word(g, l1, &mut rng), sample::word(g, l2, &mut rng), sample::point(g, &mut rng))
        })
        .collect();
    let rows: Vec<(f64, f64, bool, f64, f64)> = data
        .par_iter()
        .map(|(m1, m2, z)| {
            let g = z.genus() as f64;
            let excess = m1.mul(m2)?.height().ln() - m1.height().ln() - m2.height().ln();
            let inverse_ok = m1.inverse().height() == m1.height();
            let x = m1.height().ln() + z.norm_h().ln();
            let y = act(m1, z)?.norm_h().ln();
            Ok((excess, (2.0 * g).ln(), inverse_ok, x, y))
        })
        .collect::<Result<_>>()?;
    let mut c = Check::default();
    let excess = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    c.constant("product_log_excess", excess);
    let over = rows.iter().filter(|r| r.0 > r.1 + 1e-12).count();
    c.require(over == 0, false, || format!("{over} products exceed h(M1)h(M2) 2g"));
    let bad_inv = rows.iter().filter(|r| !r.2).count();
    c.require(bad_inv == 0, false, || format!("{bad_inv} inverses change the height"));
    let xs: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.4).collect();
    let fit = fit_line(&xs, &ys)?;
    c.constant("action_slope", fit.slope);
    c.constant("action_intercept", fit.intercept);
    c.constant("action_max_residual", fit.max_residual);
    Ok(c)
}

fn reduction_height(cfg: &SuiteConfig, k: &FrozenConstants) -> Result<Check> {
    let mut c = Check::default();
    c.constant("frozen_exponent", k.reduction_exponent);
    let rc = ReduceConfig {
        tol: cfg.membership_tol,
        ..Default::default()
    };
    for g in [1, 2].into_iter().filter(|&g| cfg.has(g)) {
        let mut rng = cfg.rng(50 + g as u64);
        let depth = cfg.budgets.survey_depth;
        let pts: Vec<SiegelPoint<f64>> =
            (0..cfg.budgets.survey_samples).map(|_| sample::boundary_point(g, &mut rng, depth)).collect();
        let rows = reduction_height_rows(&pts, &rc)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|(a, b)| (a.ln(), b.ln())).unzip();
        let fit = fit_line(&xs, &ys)?;
        c.constant(format!("slope_g{g}"), fit.slope);
        c.constant(format!("intercept_g{g}"), fit.intercept);
        c.constant(format!("max_residual_g{g}"), fit.max_residual);
        c.require(fit.slope <= k.reduction_exponent, false, || {
            format!("g={g}: slope {} exceeds frozen exponent {}", fit.slope, k.reduction_exponent)
        });
    }
    Ok(c)
}

fn metric_comparison(cfg: &SuiteConfig, k: &FrozenConstants) -> Result<Check> {
    let mut c = Check::default();
    for g in [2, 3].into_iter().filter(|&g| cfg.has(g)) {
        let cg = frozen(&k.metric_comparison, g)?;
        let n = if g == 2 {
            cfg.budgets.comparison_samples
        } else {
            cfg.budgets.ratio_samples_g3
        };
        let batch = reduced_batch(cfg, g, n, 60 + g as u64)?;
        let mut rng = cfg.rng(70 + g as u64);
        let tangents: Vec<_> = (0..n).map(|_| sample::tangent(g, &mut rng, 1.0)).collect();
        let heuristic = g == 3;
        let outcomes: Vec<Option<(f64, f64)>> = batch
            .par_iter()
            .zip(&tangents)
            .map(|(r, dz)| comparison_bound_check(&r.reduced_point, dz, cfg.membership_tol).ok())
            .collect();
        let skipped = outcomes.iter().filter(|o| o.is_none()).count();
        c.require(skipped == 0, heuristic, || format!("g={g}: {skipped} samples outside the domain"));
        let ratios: Vec<f64> = outcomes.iter().flatten().map(|(l, r)| l / r).collect();
        let violations = ratios.iter().filter(|&&q| q > cg * (1.0 + 1e-12)).count();
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        c.constant(format!("max_ratio_g{g}"), hi);
        c.constant(format!("frozen_c_g{g}"), cg);
        c.constant(format!("violations_g{g}"), violations as f64);
        c.require(violations == 0, heuristic, || format!("g={g}: {violations} samples exceed c({g}) = {cg}"));
    }
    Ok(c)
}

/// `t` for `k = 1`, `t^k + t` otherwise, on the upper half-plane.
pub fn sweep_chart(k: usize) -> CurveChart {
    let p = if k == 1 {
        Poly::monomial(1)
    } else {
        Poly::monomial(k).add(&Poly::monomial(1))
    };
    CurveChart::diagonal(vec![p], ChartDomain::upper_half_plane()).expect("genus one chart")
}

fn degree_sweep(cfg: &SuiteConfig, k: &FrozenConstants) -> Result<Check> {
    let mut c = Check::default();
    let target = cfg.budgets.volume_rel_se;
    let mut worst = 0.0f64;
    for d in 1..=cfg.budgets.sweep_degrees {
        let est = curve_volume_in_domain(&sweep_chart(d), &cfg.sampling(700 + d as u64, target))?;
        c.constant(format!("volume_k{d}"), est.value);
        let rel = est.relative_error();
        c.require(est.converged && rel <= target, false, || {
            format!("k={d}: relative standard error {rel:e} above {target:e}")
        });
        worst = worst.max(est.value / d as f64);
    }
    c.constant("max_volume_per_degree", worst);
    c.constant("frozen_constant", k.degree_sweep);
    c.require(worst <= k.degree_sweep, false, || {
        format!("max vol/k = {worst} exceeds frozen {}", k.degree_sweep)
    });
    Ok(c)
}

/// Charts used for the boundary-growth profile.
pub fn profile_charts(genera: &[usize]) -> Vec<(&'static str, CurveChart)> {
    let inf = f64::INFINITY;
    let mut out = vec![
        ("identity", CurveChart::identity()),
        (
            "quadratic",
            CurveChart::diagonal(
                vec![Poly::monomial(2).add(&Poly::monomial(1))],
                ChartDomain::Rect {
                    re: (0.0, inf),
                    im: (0.0, inf),
                },
            )
            .expect("genus one chart"),
        ),
    ];
    if genera.contains(&2) {
        out.push((
            "diagonal_g2",
            CurveChart::diagonal(
                vec![Poly::monomial(1), Poly::constant(Complex64::new(0.0, 2.0))],
                ChartDomain::Rect {
                    re: (-200.0, 200.0),
                    im: (5e-3, 200.0),
                },
            )
            .expect("diagonal chart"),
        ));
    }
    out
}

fn boundary_growth(cfg: &SuiteConfig) -> Result<Check> {
    let mut c = Check::default();
    let tol = cfg.fit_tolerance;
    for (i, (name, chart)) in profile_charts(&cfg.genera).into_iter().enumerate() {
        let sc = cfg.sampling(800 + i as u64, cfg.budgets.profile_rel_se);
        let profile = boundary_volume_profile(&chart, &cfg.budgets.profile_heights, &sc)?;
        let slope = profile.fit.slope;
        c.constant(format!("slope_{name}"), slope);
        c.require(slope >= 1.0 - tol, false, || format!("{name}: slope {slope} below {}", 1.0 - tol));
        let vols: Vec<f64> = profile.rows.iter().map(|r| r.volume.value).collect();
        c.require(vols.windows(2).all(|w| w[0] <= w[1]), false, || {
            format!("{name}: volumes not monotone {vols:?}")
        });
        if name == "identity" {
            let (lo, hi) = (2.0 * (1.0 - tol), 2.0 * (1.0 + tol));
            c.require((lo..=hi).contains(&slope), false, || {
                format!("identity slope {slope} outside [{lo}, {hi}]")
            });
        }
    }
    Ok(c)
}

/// The identity chart cut down to the box `[0,1] x [0,1]`.
pub fn box_chart() -> CurveChart {
    CurveChart::identity()
        .with_domain(ChartDomain::Rect {
            re: (0.0, 1.0),
            im: (0.0, 1.0),
        })
        .expect("same genus")
}

fn lattice_growth(cfg: &SuiteConfig) -> Result<Check> {
    let mut c = Check::default();
    let tol = cfg.fit_tolerance;
    let budget = LatticeBudget::default();
    let ts = &cfg.budgets.count_heights;
    let all = count_series(1, ts, &Predicate::All, &budget)?;
    let translate = count_series(1, ts, &Predicate::TranslateMeetsDomain { chart: box_chart() }, &budget)?;
    for (name, series) in [("all", &all), ("translate", &translate)] {
        let fit = series
            .fit
            .ok_or_else(|| Error::DegenerateFit(format!("{name}: no growth fit")))?;
        c.constant(format!("slope_{name}"), fit.slope);
        for row in &series.rows {
            c.constant(format!("count_{name}_T{}", row.t), row.count as f64);
        }
        c.require(fit.slope >= 1.0 - tol, false, || format!("{name}: slope {} below {}", fit.slope, 1.0 - tol));
    }
    let s = all.fit.expect("checked above").slope;
    let (lo, hi) = (2.0 * (1.0 - tol), 2.0 * (1.0 + tol));
    c.require((lo..=hi).contains(&s), false, || format!("full count slope {s} outside [{lo}, {hi}]"));
    Ok(c)
}

fn cm_check(cfg: &SuiteConfig) -> Result<Check> {
    let mut c = Check::default();
    let survey = cm_survey(cfg.budgets.cm_bound)?;
    let sum: usize = survey.records.iter().map(|r| r.class_number).sum();
    c.constant("class_number_slope", survey.class_number_fit.slope);
    c.constant("height_slope", survey.height_fit.slope);
    c.constant("total_points", survey.total_points as f64);
    c.require(survey.class_number_fit.slope > 0.2, false, || {
        format!("class number slope {} not above 0.2", survey.class_number_fit.slope)
    });
    let cap = 1.0 + cfg.fit_tolerance;
    c.require(survey.height_fit.slope <= cap, false, || {
        format!("height slope {} above {cap}", survey.height_fit.slope)
    });
    c.require(survey.all_in_domain, false, || "some CM point fails membership".into());
    c.require(survey.total_points == sum, false, || {
        format!("{} points but class numbers sum to {sum}", survey.total_points)
    });
    Ok(c)
}

fn run_check(id: &str, cfg: &SuiteConfig, k: &FrozenConstants) -> Result<Check> {
    match id {
        "01-group-law" => group_law(cfg),
        "02-identity-star" => identity_star(cfg),
        "03-diagonal-ratio" => diagonal_ratio_check(cfg, k),
        "04-height-bounds" => height_bounds(cfg),
        "05-reduction-height" => reduction_height(cfg, k),
        "06-metric-comparison" => metric_comparison(cfg, k),
        "07-degree-sweep" => degree_sweep(cfg, k),
        "08-boundary-growth" => boundary_growth(cfg),
        "09-lattice-growth" => lattice_growth(cfg),
        "10-cm-survey" => cm_check(cfg),
        other => Err(Error::UnknownPredicate(other.to_string())),
    }
}

/// Runs every check in order. A check that errors becomes a failed row.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Scoreboard> {
    cfg.validate()?;
    let constants = FrozenConstants::load(cfg.constants.as_deref())?;
    let mut rows: Vec<ScoreRow> = CHECKS
        .iter()
        .map(|&(id, anchor)| {
            let start = Instant::now();
            let (status, constants, diagnostics) = match run_check(id, cfg, &constants) {
                Ok(c) => (c.status(), c.constants, c.notes),
                Err(e) => (Status::Fail, BTreeMap::new(), vec![format!("error: {e}")]),
            };
            ScoreRow {
                id: id.to_string(),
                anchor: anchor.to_string(),
                status,
                constants,
                diagnostics,
                runtime_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Scoreboard { seed: cfg.seed, rows })
}

/// Sample counts used by [`calibrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationBudget {
    pub samples_g2: usize,
    pub samples_g3: usize,
    pub survey_samples: usize,
}

impl Default for CalibrationBudget {
    fn default() -> Self {
        Self {
            samples_g2: 20_000,
            samples_g3: 5_000,
            survey_samples: 2_000,
        }
    }
}

/// Fits the frozen constants on `seed`.
///
/// Sampled suprema get a relative margin of `fit_tolerance`, the reduction
/// exponent an additive one, and the degree-sweep constant five standard
/// errors; all are then rounded up to three significant figures.
pub fn calibrate(seed: u64, budget: &CalibrationBudget) -> Result<FrozenConstants> {
    let cfg = SuiteConfig {
        seed,
        ..Default::default()
    };
    let margin = 1.0 + cfg.fit_tolerance;
    let mut diagonal = BTreeMap::new();
    let mut comparison = BTreeMap::new();
    for (g, n) in [(2, budget.samples_g2), (3, budget.samples_g3)] {
        let batch = reduced_batch(&cfg, g, n, 900 + g as u64)?;
        let pts = batch.iter().map(|r| &r.reduced_point);
        let ratio = pts.clone().map(diagonal_ratio).fold(1.0, f64::max);
        let sup = pts.map(comparison_sup_ratio).fold(1.0, f64::max);
        diagonal.insert(g, round_up_3sf(ratio * margin));
        comparison.insert(g, round_up_3sf(sup * margin));
    }
    let rc = ReduceConfig::default();
    let mut exponent = 0.0f64;
    for g in [1, 2] {
        let mut rng = cfg.rng(950 + g as u64);
        let pts: Vec<SiegelPoint<f64>> = (0..budget.survey_samples)
            .map(|_| sample::boundary_point(g, &mut rng, cfg.budgets.survey_depth))
            .collect();
        let rows = reduction_height_rows(&pts, &rc)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|(a, b)| (a.ln(), b.ln())).unzip();
        exponent = exponent.max(fit_line(&xs, &ys)?.slope);
    }
    let mut sweep = 0.0f64;
    for d in 1..=cfg.budgets.sweep_degrees {
        let est = curve_volume_in_domain(&sweep_chart(d), &cfg.sampling(990 + d as u64, 1e-3))?;
        sweep = sweep.max((est.value + 5.0 * est.standard_error) / d as f64);
    }
    Ok(FrozenConstants {
        calibration_seed: seed,
        diagonal_ratio: diagonal,
        metric_comparison: comparison,
        degree_sweep: round_up_3sf(sweep),
        reduction_exponent: round_up_3sf(exponent + cfg.fit_tolerance),
    })
}
