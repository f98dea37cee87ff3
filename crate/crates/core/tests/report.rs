use siegel_core::harness::{run_suite, Budgets, ReportFormat, Scoreboard, Status, SuiteConfig, CHECKS};
use siegel_core::Error;

fn small(seed: u64) -> SuiteConfig {
    SuiteConfig {
        seed,
        budgets: Budgets {
            group_trials: 150,
            ratio_samples_g2: 200,
            ratio_samples_g3: 20,
            height_pairs: 100,
            survey_samples: 60,
            comparison_samples: 500,
            profile_rel_se: 1e-2,
            count_heights: vec![10, 20, 40],
            cm_bound: 800,
            ..Default::default()
        },
        ..Default::default()
    }
}

#[test]
fn rows_cover_the_check_table() {
    let board = run_suite(&small(3)).unwrap();
    let got: Vec<(&str, &str)> = board.rows.iter().map(|r| (r.id.as_str(), r.anchor.as_str())).collect();
    assert_eq!(got, CHECKS.to_vec());
    assert!(board.passed(), "{:#?}", board.rows.iter().filter(|r| r.status != Status::Pass).collect::<Vec<_>>());
    assert!(board.rows.iter().all(|r| r.runtime_ms.is_none()));
}

#[test]
fn zero_action_tolerance_fails_the_group_rows() {
    let cfg = SuiteConfig {
        action_tol: 0.0,
        genera: vec![2],
        ..small(4)
    };
    let board = run_suite(&cfg).unwrap();
    for id in ["01-group-law", "02-identity-star"] {
        let row = board.row(id).unwrap();
        assert_eq!(row.status, Status::Fail, "{id}");
        assert!(row.diagnostics.iter().any(|d| d.contains("residual")), "{:?}", row.diagnostics);
    }
    assert!(!board.passed());
    assert_eq!(board.row("07-degree-sweep").unwrap().status, Status::Pass);
}

#[test]
fn invalid_config_is_rejected() {
    let cfg = SuiteConfig {
        fit_tolerance: -1.0,
        ..small(1)
    };
    assert!(matches!(run_suite(&cfg), Err(Error::Precondition(_))));
}

#[test]
fn seed_change_keeps_the_pattern() {
    let a = run_suite(&small(10)).unwrap();
    let b = run_suite(&small(11)).unwrap();
    let pattern = |s: &Scoreboard| s.rows.iter().map(|r| r.status).collect::<Vec<_>>();
    assert_eq!(pattern(&a), pattern(&b));
    let (ra, rb) = (a.row("07-degree-sweep").unwrap(), b.row("07-degree-sweep").unwrap());
    for k in 1..=6 {
        let key = format!("volume_k{k}");
        let (va, vb) = (ra.constants[&key], rb.constants[&key]);
        // each estimate has relative standard error at most 1e-3
        let sigma = 1e-3 * (va * va + vb * vb).sqrt();
        assert!((va - vb).abs() <= 3.0 * sigma, "{key}: {va} vs {vb}");
    }
}

#[test]
fn exports() {
    let board = run_suite(&small(5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("b.json");
    board.export(&json, ReportFormat::Json).unwrap();
    let back: Scoreboard = siegel_core::io::read_json(&json).unwrap();
    assert_eq!(back, board);
    assert_eq!(back.to_json().unwrap(), std::fs::read_to_string(&json).unwrap());

    let csv = board.to_csv().unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.records().count(), CHECKS.len());

    let md = board.to_markdown();
    let line = md.lines().find(|l| l.contains("05-reduction-height")).unwrap();
    assert!(line.contains("h(\\gamma_Z)\\prec h(Z)"));

    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "x").unwrap();
    let err = board.export(&blocked.join("b.md"), ReportFormat::Markdown).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}
