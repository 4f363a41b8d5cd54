use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use helpercap_cli::output::read_csv;
use helpercap_cli::report::{ClassifyReport, McSummary, RegionReport};
use helpercap_cli::{run_region, run_verify_with, RunConfig, VerifyTarget};
use helpercap_core::closed_form::second_order_stats;
use helpercap_core::verify::Formulas;
use helpercap_core::*;
use tempfile::TempDir;

const BASE: &str = r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12,
    "directions":8,"rho_grid":8,"budget":{"rho_grid":5,"gamma_grid":5,"max_iters":200,"restarts":2,"line_iters":40}}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_helpercap"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn region(dir: &TempDir, config: &str, out: &str, extra: &[&str]) -> Output {
    let cfg = write_config(dir.path(), "cfg.json", config);
    let out = dir.path().join(out);
    let mut args = vec!["region", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn region_writes_all_outputs_and_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let o = region(&dir, BASE, "out", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in ["outer.csv", "inner.csv", "ts.csv", "report.json", "region.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }

    let run = RunConfig::from_json(BASE).unwrap();
    let cfg = run.channel().unwrap();
    let outer = outer_region_boundary(&cfg, run.rho_grid);
    let inner = inner_region_boundary(&cfg, run.directions, &run.budget);
    for (file, boundary) in [("outer.csv", &outer), ("inner.csv", &inner)] {
        let (unit, pts) = read_csv(&out.join(file)).unwrap();
        assert_eq!(unit, RateUnit::Bits);
        assert_eq!(pts, boundary.points(), "{file}");
    }
    let header = fs::read_to_string(out.join("ts.csv")).unwrap();
    assert!(header.starts_with("r1_bits,r2_bits\n"));

    let (_, ts) = read_csv(&out.join("ts.csv")).unwrap();
    let ts = RegionBoundary::from_rates(&ts, Provenance::TimeSharing { lambda: 0.0 });
    for p in ts.points() {
        assert!(inner.contains(p, 1e-6));
    }
}

#[test]
fn nats_flag_converts_every_output() {
    let dir = TempDir::new().unwrap();
    let o = region(&dir, BASE, "nats", &["--unit", "nats"]);
    assert_eq!(code(&o), 0);
    let out = dir.path().join("nats");
    let (unit, pts) = read_csv(&out.join("inner.csv")).unwrap();
    assert_eq!(unit, RateUnit::Nats);
    let run = RunConfig::from_json(BASE).unwrap();
    let inner = inner_region_boundary(&run.channel().unwrap(), run.directions, &run.budget);
    let expected: Vec<RatePair> = inner
        .points()
        .iter()
        .map(|p| RatePair::new(RateUnit::Nats.from_bits(p.r1), RateUnit::Nats.from_bits(p.r2)))
        .collect();
    assert_eq!(pts, expected);
    let report: RegionReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.unit, RateUnit::Nats);
    assert!(fs::read_to_string(out.join("region.svg")).unwrap().contains("nats"));
}

#[test]
fn report_json_round_trips() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&region(&dir, BASE, "out", &[])), 0);
    let text = fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let parsed: RegionReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    let reparsed: RegionReport = serde_json::from_str(&again).unwrap();
    assert_eq!(parsed, reparsed);
    assert_eq!(again, serde_json::to_string_pretty(&reparsed).unwrap());
    assert_eq!(text.trim_end(), again);

    assert_eq!(parsed.segments.user1.class, SegmentClass::A);
    assert!(parsed.gap.margin_45 > 0.0);
    assert!(parsed.gap.inner_excess_over_outer <= 1e-6);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["segments"]["user1"]["class"], "A");
    assert_eq!(value["inner"][0]["provenance"]["kind"], "strategy");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&region(&dir, BASE, "a", &[])), 0);
    assert_eq!(code(&region(&dir, BASE, "b", &[])), 0);
    for f in ["outer.csv", "inner.csv", "ts.csv", "report.json", "region.svg"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn high_helper_power_config_succeeds() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"eta1":0.5,"eta2":1,"p0":50,"p1":5,"p2":5,"q1":100,"q2":100,"directions":8}"#;
    let o = region(&dir, cfg, "out", &[]);
    assert_eq!(code(&o), 0);
    let (_, inner) = read_csv(&dir.path().join("out/inner.csv")).unwrap();
    assert!(!inner.is_empty());
}

#[test]
fn negative_power_exits_with_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = region(&dir, r#"{"eta1":1,"eta2":1,"p0":-1,"p1":5,"p2":5,"q1":12,"q2":12}"#, "out", &[]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("p0 negative"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn missing_config_exits_with_usage_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    for cmd in ["region", "classify", "mc"] {
        let o = run(&[cmd, "--config", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{cmd}");
    }
    assert_eq!(code(&run(&["region"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn classify_reports_expected_classes() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12}"#, "A", None),
        (r#"{"eta1":1,"eta2":1,"p0":50,"p1":5,"p2":5,"q1":100,"q2":100}"#, "C", Some(0.5 * 6f64.log2())),
        (r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":0,"q2":0}"#, "C", Some(0.5 * 6f64.log2())),
    ];
    for (i, (text, class, rate)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.json"), text);
        let out = dir.path().join(format!("c{i}"));
        let o = run(&["classify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let text = fs::read_to_string(out.join("report.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["segments"]["user1"]["class"], *class);
        let report: ClassifyReport = serde_json::from_str(&text).unwrap();
        if let Some(r) = rate {
            assert!((report.segments.user1.rate.unwrap() - r).abs() <= 1e-9);
        }
        if i == 2 {
            assert_eq!(report.segments.user2.class, SegmentClass::C);
        }
    }
}

#[test]
fn verify_random_passes() {
    let o = run(&["verify", "--random", "1000", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("f2 vs oracle") && text.contains("all checks passed"));
}

#[test]
fn verify_config_passes_and_writes_json() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", BASE);
    let out = dir.path().join("v");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--random", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
}

/// Numerator with the full-power fraction for both users.
fn corrupted_f(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> helpercap_core::Result<f64> {
    let st = second_order_stats(cfg, s)?;
    let eta = cfg.eta(k);
    Ok(0.5 * (eta * eta * s.gamma * s.p0_prime(cfg) * st.sigma2_y(k) / st.h(k)).log2())
}

#[test]
fn corrupted_formula_fails_verification() {
    let bad = Formulas {
        rate_f: corrupted_f,
        ..Formulas::default()
    };
    let report = run_verify_with(VerifyTarget::Random { cases: 100 }, 1, &bad).unwrap();
    assert!(!report.pass);
    let good = run_verify_with(VerifyTarget::Random { cases: 100 }, 1, &Formulas::default()).unwrap();
    assert!(good.pass);
}

#[test]
fn mc_passes_by_default_and_fails_with_few_samples() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "ok.json", r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12}"#);
    let out = dir.path().join("ok");
    let o = run(&["mc", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let first = fs::read(out.join("mc_report.json")).unwrap();
    let summary: McSummary = serde_json::from_slice(&first).unwrap();
    assert!(summary.pass && summary.seed == 7);

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12,"mc":{"n":10,"tol":1e-6}}"#,
    );
    let out = dir.path().join("bad");
    let o = run(&["mc", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let summary: McSummary = serde_json::from_slice(&fs::read(out.join("mc_report.json")).unwrap()).unwrap();
    assert!(!summary.pass);
}

#[test]
fn library_region_matches_binary_output() {
    let dir = TempDir::new().unwrap();
    let run_cfg = RunConfig::from_json(BASE).unwrap();
    let report = run_region(&run_cfg, &dir.path().join("lib")).unwrap();
    assert_eq!(code(&region(&dir, BASE, "bin", &[])), 0);
    let from_bin: RegionReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bin/report.json")).unwrap()).unwrap();
    assert_eq!(report, from_bin);
}
