use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use siegel_core::chart::CurveChart;
use siegel_core::cm::cm_survey;
use siegel_core::geometry::{act, SiegelPoint};
use siegel_core::harness::{calibrate, run_suite, CalibrationBudget, ReportFormat, Scoreboard, SuiteConfig};
use siegel_core::integrate::{Method, SamplingConfig};
use siegel_core::io::{read_json, to_json_string, write_json, MatrixLiteral};
use siegel_core::lattice::{count_series, CountQuery, CountSeries, LatticeBudget, Predicate};
use siegel_core::reduction::{siegel_reduce, ReduceConfig};
use siegel_core::volume::{boundary_volume_profile, curve_volume_in_domain};
use siegel_core::IntSymplectic;

#[derive(Parser)]
#[command(name = "siegel", version, about = "Siegel space toolkit and check suite")]
struct Cli {
    /// Random seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suite configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a point into the fundamental domain.
    Reduce {
        #[arg(long)]
        point: PathBuf,
        /// Expected genus.
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Apply a symplectic matrix to a point.
    Act {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// Volume of a chart inside the fundamental domain, or a boundary profile.
    Volume {
        #[arg(long)]
        chart: PathBuf,
        /// Comma-separated height bounds M.
        #[arg(long, value_delimiter = ',')]
        boundary: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = MethodArg::MonteCarlo)]
        method: MethodArg,
        /// Target relative standard error.
        #[arg(long, default_value_t = 1e-3)]
        target: f64,
    },
    /// Count integral symplectic matrices of height at most T.
    Count {
        #[arg(long)]
        g: usize,
        #[arg(long = "T", value_name = "T")]
        t: Option<i64>,
        #[arg(long, default_value = "all")]
        predicate: String,
        #[arg(long)]
        chart: Option<PathBuf>,
        /// Comma-separated height bounds; adds a growth fit.
        #[arg(long, value_delimiter = ',')]
        series: Option<Vec<i64>>,
    },
    /// Class numbers and CM points for discriminants down to -bound.
    CmSurvey {
        #[arg(long)]
        bound: i64,
        /// Include every form and point in the JSON output.
        #[arg(long)]
        records: bool,
    },
    /// Run the check suite and emit the scoreboard.
    Suite(SuiteArgs),
    /// Re-emit a scoreboard JSON in another format.
    Export {
        #[arg(long)]
        board: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
    },
    /// Refit the frozen constants on a calibration seed.
    Calibrate,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, value_delimiter = ',')]
    genera: Option<Vec<usize>>,
    #[arg(long)]
    action_tol: Option<f64>,
    #[arg(long)]
    membership_tol: Option<f64>,
    #[arg(long)]
    fit_tolerance: Option<f64>,
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    MonteCarlo,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

impl FormatArg {
    fn format(self) -> ReportFormat {
        match self {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<()> {
    print!("{}", to_json_string(value)?);
    if let Some(dir) = out {
        write_json(&dir.join(name), value)?;
    }
    Ok(())
}

fn write_csv(out: Option<&Path>, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let Some(dir) = out else { return Ok(()) };
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_point(path: &Path) -> Result<SiegelPoint<f64>> {
    read_json(path).with_context(|| format!("reading point {}", path.display()))
}

fn read_chart(path: &Path) -> Result<CurveChart> {
    read_json(path).with_context(|| format!("reading chart {}", path.display()))
}

fn suite_config(cli: &Cli, args: &SuiteArgs) -> Result<SuiteConfig> {
    let mut cfg: SuiteConfig = match &cli.config {
        Some(p) => read_json(p).with_context(|| format!("reading config {}", p.display()))?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(g) = &args.genera {
        cfg.genera = g.clone();
    }
    if let Some(v) = args.action_tol {
        cfg.action_tol = v;
    }
    if let Some(v) = args.membership_tol {
        cfg.membership_tol = v;
    }
    if let Some(v) = args.fit_tolerance {
        cfg.fit_tolerance = v;
    }
    if let Some(c) = &args.constants {
        cfg.constants = Some(c.clone());
    }
    cfg.timing |= args.timing;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Reduce { point, g, budget } => {
            let z = read_point(point)?;
            if let Some(g) = g {
                if *g != z.genus() {
                    bail!("point has genus {}, expected {g}", z.genus());
                }
            }
            let cfg = ReduceConfig {
                step_budget: *budget,
                ..Default::default()
            };
            let r = siegel_reduce(&z, &cfg)?;
            let value = json!({
                "gamma": MatrixLiteral::from_matrix(&r.gamma),
                "reduced_point": r.reduced_point,
                "steps": r.steps,
                "height_in": r.height_in.value(),
                "height_gamma": r.height_gamma.value().to_string(),
                "report": r.report,
                "imag_det_trace": r.imag_det_trace,
            });
            emit(&value, out, "reduce.json")?;
        }
        Command::Act { matrix, point } => {
            let m: IntSymplectic =
                read_json(matrix).with_context(|| format!("reading matrix {}", matrix.display()))?;
            let w = act(&m, &read_point(point)?)?;
            emit(&w, out, "act.json")?;
        }
        Command::Volume {
            chart,
            boundary,
            method,
            target,
        } => {
            let chart = read_chart(chart)?;
            let sc = SamplingConfig {
                seed,
                method: match method {
                    MethodArg::MonteCarlo => Method::MonteCarlo,
                    MethodArg::Grid => Method::AdaptiveGrid,
                },
                target_rel_se: *target,
                ..Default::default()
            };
            match boundary {
                None => emit(&curve_volume_in_domain(&chart, &sc)?, out, "volume.json")?,
                Some(ms) => {
                    let profile = boundary_volume_profile(&chart, ms, &sc)?;
                    let rows = profile
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.m.to_string(),
                                r.volume.value.to_string(),
                                r.volume.standard_error.to_string(),
                                r.volume.converged.to_string(),
                            ]
                        })
                        .collect();
                    write_csv(out, "profile.csv", &["M", "volume", "standard_error", "converged"], rows)?;
                    emit(&profile, out, "profile.json")?;
                }
            }
        }
        Command::Count {
            g,
            t,
            predicate,
            chart,
            series,
        } => {
            let chart = chart.as_deref().map(read_chart).transpose()?;
            let pred = Predicate::from_name(predicate, chart)?;
            let budget = LatticeBudget::default();
            let result: CountSeries = match (t, series) {
                (_, Some(ts)) => count_series(*g, ts, &pred, &budget)?,
                (Some(t), None) => siegel_core::lattice::count_filtered(
                    &CountQuery {
                        g: *g,
                        t: *t,
                        predicate: pred,
                    },
                    &budget,
                )?,
                (None, None) => bail!("give --T or --series"),
            };
            let rows = result
                .rows
                .iter()
                .map(|r| vec![r.t.to_string(), r.count.to_string()])
                .collect();
            write_csv(out, "count.csv", &["T", "count"], rows)?;
            emit(&result, out, "count.json")?;
        }
        Command::CmSurvey { bound, records } => {
            let s = cm_survey(*bound)?;
            let rows = s
                .records
                .iter()
                .map(|r| vec![r.d.to_string(), r.class_number.to_string(), r.max_height.to_string()])
                .collect();
            write_csv(out, "cm.csv", &["D", "class_number", "max_height"], rows)?;
            let mut value = json!({
                "bound": bound,
                "discriminants": s.records.len(),
                "total_points": s.total_points,
                "all_in_domain": s.all_in_domain,
                "class_number_fit": s.class_number_fit,
                "height_fit": s.height_fit,
            });
            if *records {
                value["records"] = serde_json::to_value(&s.records)?;
            }
            emit(&value, out, "cm_survey.json")?;
        }
        Command::Suite(args) => {
            let cfg = suite_config(&cli, args)?;
            let board = run_suite(&cfg)?;
            print!("{}", board.to_json()?);
            if let Some(dir) = &cfg.out {
                board.export(&dir.join("scoreboard.json"), ReportFormat::Json)?;
                board.export(&dir.join("scoreboard.csv"), ReportFormat::Csv)?;
            }
            for r in &board.rows {
                eprintln!("{:<22} {}", r.id, r.status.as_str());
            }
            return Ok(board.passed());
        }
        Command::Export { board, format } => {
            let b: Scoreboard = read_json(board).with_context(|| format!("reading board {}", board.display()))?;
            let f = format.format();
            match out {
                Some(dir) => b.export(&dir.join(format!("scoreboard.{}", f.extension())), f)?,
                None => print!("{}", b.render(f)?),
            }
        }
        Command::Calibrate => {
            let k = calibrate(seed, &CalibrationBudget::default())?;
            emit(&k, out, "frozen_constants.json")?;
        }
    }
    Ok(true)
}
