//! CSV polylines and the SVG overlay.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use helpercap_core::{RatePair, RateUnit, RegionBoundary};

/// Writes one vertex per line, Pareto-sorted, in `unit`. Values carry 17
/// significant digits so that reading them back is exact.
pub fn write_csv(path: &Path, boundary: &RegionBoundary, unit: RateUnit) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    let s = unit.suffix();
    w.write_record([format!("r1_{s}"), format!("r2_{s}")])?;
    for p in boundary.points() {
        w.write_record([
            format!("{:.16e}", unit.from_bits(p.r1)),
            format!("{:.16e}", unit.from_bits(p.r2)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a polyline written by [`write_csv`], returning the unit from the
/// header and the points as stored.
pub fn read_csv(path: &Path) -> Result<(RateUnit, Vec<RatePair>)> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = r.headers()?.clone();
    let unit = match (headers.get(0), headers.get(1)) {
        (Some("r1_bits"), Some("r2_bits")) => RateUnit::Bits,
        (Some("r1_nats"), Some("r2_nats")) => RateUnit::Nats,
        _ => anyhow::bail!("unexpected header {headers:?} in {}", path.display()),
    };
    let mut points = Vec::new();
    for row in r.records() {
        let row = row?;
        let parse = |i: usize| -> Result<f64> {
            let field = row.get(i).context("short row")?;
            field.parse().with_context(|| format!("bad number '{field}'"))
        };
        points.push(RatePair::new(parse(0)?, parse(1)?));
    }
    Ok((unit, points))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 70.0;

/// Tick spacing giving roughly five ticks up to `max`.
fn tick_step(max: f64) -> f64 {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Self-contained SVG overlaying labelled polylines (closed down to both
/// axes), with axes in `unit`.
pub fn render_svg(curves: &[(&str, &str, &RegionBoundary)], unit: RateUnit, title: &str) -> String {
    let max = curves
        .iter()
        .flat_map(|(_, _, b)| [b.max_r1(), b.max_r2()])
        .fold(0.0f64, f64::max);
    let extent = unit.from_bits(if max > 0.0 { max } else { 1.0 }) * 1.05;
    let plot = WIDTH - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + v / extent * plot;
    let y = |v: f64| HEIGHT - MARGIN - v / extent * plot;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let step = tick_step(extent);
    let mut t = 0.0;
    while t <= extent + 1e-12 {
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            x(t),
            y(0.0),
            x(t),
            y(extent)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            x(0.0),
            y(t),
            x(extent),
            y(t)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(t),
            y(0.0) + 18.0,
            fmt_tick(t, step)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x(0.0) - 6.0,
            y(t) + 4.0,
            fmt_tick(t, step)
        );
        t += step;
    }
    let _ = writeln!(
        s,
        r#"<path d="M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2}" fill="none" stroke="black"/>"#,
        x(0.0),
        y(extent),
        x(0.0),
        y(0.0),
        x(extent),
        y(0.0)
    );
    let u = unit.suffix();
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">R1 [{u}/use]</text>"#,
        WIDTH / 2.0,
        HEIGHT - 25.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">R2 [{u}/use]</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, (label, colour, b)) in curves.iter().enumerate() {
        let pts = b.points();
        if pts.is_empty() {
            continue;
        }
        let mut d = format!("M {:.3} {:.3}", x(0.0), y(unit.from_bits(pts[0].r2)));
        for p in &pts {
            let _ = write!(d, " L {:.3} {:.3}", x(unit.from_bits(p.r1)), y(unit.from_bits(p.r2)));
        }
        let last = pts[pts.len() - 1];
        let _ = write!(d, " L {:.3} {:.3}", x(unit.from_bits(last.r1)), y(0.0));
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.8"/>"#
        );
        let ly = MARGIN + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN - 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use helpercap_core::Provenance;

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(10.0), 2.0);
        assert_eq!(tick_step(0.3), 0.05);
    }

    #[test]
    fn svg_contains_every_curve() {
        let b = RegionBoundary::from_rates(
            &[RatePair::new(0.0, 1.0), RatePair::new(1.0, 0.0)],
            Provenance::TimeSharing { lambda: 0.0 },
        );
        let svg = render_svg(&[("a", "red", &b), ("b<c", "blue", &b)], RateUnit::Nats, "t");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("stroke-width=\"1.8\"").count(), 2);
        assert!(svg.contains("b&lt;c") && svg.contains("nats/use"));
    }
}
