//! Driver behind the `helpercap` binary: region tracing, verification,
//! classification and Monte Carlo runs with their file outputs.

pub mod config;
pub mod output;
pub mod report;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use helpercap_core::inner::directions;
use helpercap_core::outer::convexify;
use helpercap_core::verify::{verify_config, verify_random, Formulas, VerifyReport};
use helpercap_core::{
    alpha_star_dpc, beta_from_rho, capacity_segments, covariance_check, inner_region_boundary,
    outer_region_boundary, time_sharing_boundary, ChannelConfig, CorrelationPoint, HelperStrategy,
    User,
};
use serde::Serialize;

pub use config::{McSettings, RunConfig};
use report::*;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))
}

fn describe(c: &ChannelConfig) -> String {
    let [e1, e2, p0, p1, p2, q1, q2] = c.to_array();
    format!("eta=({e1}, {e2})  P0={p0}  P=({p1}, {p2})  Q=({q1}, {q2})")
}

/// Traces all three regions and writes `outer.csv`, `inner.csv`, `ts.csv`,
/// `report.json` and `region.svg` into `out`.
pub fn run_region(run: &RunConfig, out: &Path) -> Result<RegionReport> {
    let cfg = run.channel()?;
    let unit = run.unit;
    prepare(out)?;

    let (outer, (inner, ts)) = rayon::join(
        || outer_region_boundary(&cfg, run.rho_grid),
        || {
            (
                inner_region_boundary(&cfg, run.directions, &run.budget),
                time_sharing_boundary(&cfg, 2 * run.directions + 1, &run.budget),
            )
        },
    );
    let segments = capacity_segments(&cfg, &run.budget);
    let convex = convexify(&outer);

    let dirs: Vec<DirectionGap> = directions(run.directions)
        .into_iter()
        .map(|theta| DirectionGap {
            theta,
            outer: unit.from_bits(outer.support(theta)),
            inner: unit.from_bits(inner.support(theta)),
            time_sharing: unit.from_bits(ts.support(theta)),
        })
        .collect();
    let diagonal = std::f64::consts::FRAC_PI_4;
    let gap = GapMetrics {
        max_outer_inner_gap: dirs.iter().map(|d| d.outer - d.inner).fold(0.0, f64::max),
        directions: dirs,
        inner_excess_over_outer: unit.from_bits(inner.excess_over(&outer)),
        time_sharing_excess_over_inner: unit.from_bits(ts.excess_over(&inner)),
        margin_45: unit.from_bits(inner.support(diagonal) - ts.support(diagonal)),
    };

    let report = RegionReport {
        unit,
        channel: cfg,
        settings: Settings {
            directions: run.directions,
            rho_grid: run.rho_grid,
            budget: run.budget,
        },
        outer: BoundaryReport::new(&outer, unit),
        convexification: ConvexificationReport::new(&convex, unit),
        inner: vertex_reports(&inner, unit),
        time_sharing: BoundaryReport::new(&ts, unit),
        gap,
        segments: segments_in(segments, unit),
    };

    output::write_csv(&out.join("outer.csv"), &outer, unit)?;
    output::write_csv(&out.join("inner.csv"), &inner, unit)?;
    output::write_csv(&out.join("ts.csv"), &ts, unit)?;
    write_json(&out.join("report.json"), &report)?;
    let svg = output::render_svg(
        &[
            ("outer bound", "#c0392b", &outer),
            ("inner bound", "#2471a3", &inner),
            ("time sharing", "#7f8c8d", &ts),
        ],
        unit,
        &describe(&cfg),
    );
    fs::write(out.join("region.svg"), svg).context("cannot write region.svg")?;
    Ok(report)
}

/// What `verify` checks.
#[derive(Debug, Clone, Copy)]
pub enum VerifyTarget<'a> {
    /// Random channels and strategies.
    Random { cases: usize },
    /// Random strategies on a fixed channel.
    Config { run: &'a RunConfig, cases: usize },
}

/// Runs the identity suites against `formulas`, so that a deliberately
/// broken implementation can be exercised.
pub fn run_verify_with(target: VerifyTarget, seed: u64, formulas: &Formulas) -> Result<VerifyReport> {
    Ok(match target {
        VerifyTarget::Random { cases } => verify_random(cases, seed, formulas)?,
        VerifyTarget::Config { run, cases } => verify_config(&run.channel()?, cases, seed, formulas)?,
    })
}

pub fn run_verify(target: VerifyTarget, seed: u64) -> Result<VerifyReport> {
    run_verify_with(target, seed, &Formulas::default())
}

/// Human-readable verification summary.
pub fn format_verify(r: &VerifyReport) -> String {
    let mut s = format!("{} cases, seed {}\n", r.cases, r.seed);
    for c in &r.checks {
        let verdict = if c.pass { "ok" } else { "FAILED" };
        s.push_str(&format!(
            "{:<26} worst {:.3e}  tol {:.0e}  {verdict}\n",
            c.name, c.worst, c.tol
        ));
    }
    s.push_str(if r.pass { "all checks passed\n" } else { "verification failed\n" });
    s
}

/// Classifies both users and writes `report.json` into `out`.
pub fn run_classify(run: &RunConfig, out: &Path) -> Result<ClassifyReport> {
    let cfg = run.channel()?;
    prepare(out)?;
    let report = ClassifyReport {
        unit: run.unit,
        channel: cfg,
        segments: segments_in(capacity_segments(&cfg, &run.budget), run.unit),
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

/// Strategies sampled by `mc`: three power splits, with and without direct
/// state cancellation, each with dirty-paper coefficients for both users.
pub fn mc_strategies(cfg: &ChannelConfig) -> Vec<HelperStrategy> {
    let mut out = Vec::new();
    for rho in [CorrelationPoint::projected(0.0, 0.0), CorrelationPoint::projected(-0.3, 0.3)] {
        let beta = beta_from_rho(cfg, &rho);
        for gamma in [0.0, 0.5, 1.0] {
            out.push(
                HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma)
                    .with_alpha(alpha_star_dpc(User::One, cfg, beta, gamma))
                    .with_alpha(alpha_star_dpc(User::Two, cfg, beta, gamma)),
            );
        }
    }
    out
}

/// Compares sampled and analytic covariances over [`mc_strategies`] and
/// writes `mc_report.json` into `out`.
pub fn run_mc(run: &RunConfig, out: &Path) -> Result<McSummary> {
    let cfg = run.channel()?;
    prepare(out)?;
    let McSettings { n, seed, tol } = run.mc;
    let mut cases = Vec::new();
    for strategy in mc_strategies(&cfg) {
        let report = covariance_check(&cfg, &strategy, n, seed, tol)?;
        cases.push(McCase { strategy, report });
    }
    let summary = McSummary {
        channel: cfg,
        samples: n,
        seed,
        tol_rel: tol,
        max_rel_error: cases.iter().map(|c| c.report.max_rel_error).fold(0.0, f64::max),
        pass: cases.iter().all(|c| c.report.pass),
        cases,
    };
    write_json(&out.join("mc_report.json"), &summary)?;
    Ok(summary)
}
