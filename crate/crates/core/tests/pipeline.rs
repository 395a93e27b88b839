use std::process::Command;

use kslab::field::EltCoords;
use kslab::pipeline::{emit_report, parse_config, run_pipeline, Format, Method, PhiSelection, PipelineConfig, PipelineReport, StageStatus};

fn quick(phi: PhiSelection) -> PipelineConfig {
    PipelineConfig {
        phi,
        gram_models: vec![],
        small_instance: false,
        ..PipelineConfig::default()
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kslab"))
}

#[test]
fn defaults_reproduce_ranks() {
    let report = run_pipeline(&PipelineConfig::default());
    let diag = &report.ranks[0];
    let ranks: Vec<usize> = diag.ranks.iter().map(|r| r.rank).collect();
    assert_eq!(ranks, vec![247, 256]);
    assert!(report.all_verified());
    let geometric = report.stages.iter().find(|s| s.name == "geometric").unwrap();
    assert_eq!(geometric.status, StageStatus::Skipped);
}

#[test]
fn searched_phi_runs_geometric_stage() {
    let report = run_pipeline(&quick(PhiSelection::Searched(kslab::pipeline::default_search())));
    assert_eq!(report.d_signature, Some((2, 7)));
    assert!(report.embedding.as_ref().unwrap().verified);
    let hodge = report.hodge.as_ref().unwrap();
    assert!(!hodge.witness_cup_preserving && hodge.sweep_all_rational);
    assert!(report.all_verified());
}

#[test]
fn paper_listed_reports_diagnostic() {
    let report = run_pipeline(&quick(PhiSelection::PaperListed));
    assert_eq!(report.d_signature, Some((4, 5)));
    let patterns: Vec<_> = report.phi.iter().map(|p| p.pattern.pair()).collect();
    assert_eq!(patterns, vec![(3, 0), (1, 2), (0, 3)]);
    assert!(report.period.is_none());
    let g = report.stages.iter().find(|s| s.name == "geometric").unwrap();
    assert_eq!(g.status, StageStatus::Skipped);
    assert!(g.detail.contains("(4, 5)"));
}

#[test]
fn reports_are_reproducible_and_round_trip() {
    let c = quick(PhiSelection::Searched(kslab::pipeline::default_search()));
    let (a, b) = (run_pipeline(&c), run_pipeline(&c));
    let ja = emit_report(&a.without_timings(), Format::Json);
    assert_eq!(ja, emit_report(&b.without_timings(), Format::Json));
    let back: PipelineReport = serde_json::from_str(&ja).unwrap();
    assert_eq!(emit_report(&back, Format::Json), ja);
}

#[test]
fn claims_carry_methods() {
    let report = run_pipeline(&quick(PhiSelection::Searched(kslab::pipeline::default_search())));
    for c in &report.claims {
        let numeric = c.name.contains("v^T") || c.name.contains("x3") || c.name.contains("period line") || c.name.contains("signature(D)");
        if numeric {
            assert_eq!(c.method, Method::Interval, "{}", c.name);
        }
    }
    let text = emit_report(&report, Format::Text);
    assert!(text.contains("i <= j"));
}

#[test]
fn explicit_phi_is_echoed() {
    let text = r#"{"phi": {"kind": "explicit", "coords": [["1","0","0"],["0","1","0"],["-1/2","0","3"]]}, "gram_models": [], "small_instance": false}"#;
    let c = parse_config(Some(text)).unwrap();
    let report = run_pipeline(&c);
    let json: serde_json::Value = serde_json::from_str(&emit_report(&report, Format::Json)).unwrap();
    assert_eq!(json["config"]["phi"]["coords"][2], serde_json::json!(["-1/2", "0", "3"]));
    if let PhiSelection::Explicit { coords } = &report.config.phi {
        assert_eq!(coords[2], EltCoords([kslab::arith::qf(-1, 2), kslab::arith::q(0), kslab::arith::q(3)]));
    }
}

#[test]
fn cli_exit_codes() {
    let dir = std::env::temp_dir().join(format!("kslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();

    let bad = write("bad.json", "{ not json");
    assert_eq!(code(&["pipeline", "--config", bad.to_str().unwrap()]), 2);
    let prime = write("prime.json", r#"{"modulus": 4}"#);
    assert_eq!(code(&["pipeline", "--config", prime.to_str().unwrap()]), 2);
    let t = write("t.json", r#"{"t": "0"}"#);
    assert_eq!(code(&["pipeline", "--config", t.to_str().unwrap()]), 2);

    let reducible = write("red.json", r#"{"matrix": [[1,0,0],[0,1,0],[0,0,1]], "small_instance": false}"#);
    let out = bin().args(["pipeline", "--config", reducible.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["failed_stage"], "field");

    let small = write("ok.json", r#"{"gram_models": [], "small_instance": false}"#);
    let out_path = dir.join("report.json");
    assert_eq!(code(&["pipeline", "--config", small.to_str().unwrap(), "--out", out_path.to_str().unwrap()]), 0);
    let saved: PipelineReport = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(saved.d_signature, Some((7, 2)));

    assert_eq!(code(&["qform", "--diag", "1,-1,2"]), 0);
    assert_eq!(code(&["qform", "--diag", "1,0"]), 3);
    assert_eq!(code(&["ks"]), 0);
    assert_eq!(code(&["clifford", "--prime", "9"]), 2);
    std::fs::remove_dir_all(&dir).ok();
}
