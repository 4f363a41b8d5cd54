//! JSON documents written by the commands. Rates are expressed in the unit
//! recorded in each document.

use helpercap_core::classify::UserSegment;
use helpercap_core::outer::Convexification;
use helpercap_core::{
    ChannelConfig, McReport, OptimizerBudget, Provenance, RateUnit, RegionBoundary, SegmentReport,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub directions: usize,
    pub rho_grid: usize,
    pub budget: OptimizerBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub r1: f64,
    pub r2: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub vertices: usize,
    pub max_r1: f64,
    pub max_r2: f64,
}

impl BoundaryReport {
    pub fn new(b: &RegionBoundary, unit: RateUnit) -> Self {
        BoundaryReport {
            vertices: b.len(),
            max_r1: unit.from_bits(b.max_r1()),
            max_r2: unit.from_bits(b.max_r2()),
        }
    }
}

pub fn vertex_reports(b: &RegionBoundary, unit: RateUnit) -> Vec<VertexReport> {
    b.vertices()
        .iter()
        .map(|v| VertexReport {
            r1: unit.from_bits(v.rate.r1),
            r2: unit.from_bits(v.rate.r2),
            provenance: v.provenance,
        })
        .collect()
}

/// Outer frontier against its concave hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexificationReport {
    pub is_convex: bool,
    pub gap: f64,
    pub hull_vertices: usize,
}

impl ConvexificationReport {
    pub fn new(c: &Convexification, unit: RateUnit) -> Self {
        ConvexificationReport {
            is_convex: c.is_convex,
            gap: unit.from_bits(c.gap),
            hull_vertices: c.hull.len(),
        }
    }
}

/// Support values of the three regions along one weighted-sum direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionGap {
    pub theta: f64,
    pub outer: f64,
    pub inner: f64,
    pub time_sharing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapMetrics {
    pub directions: Vec<DirectionGap>,
    /// Largest outer-minus-inner support gap over the directions.
    pub max_outer_inner_gap: f64,
    /// Largest amount by which an inner vertex leaves the outer region.
    pub inner_excess_over_outer: f64,
    /// Largest amount by which a time-sharing vertex leaves the inner region.
    pub time_sharing_excess_over_inner: f64,
    /// Inner minus time-sharing support at 45 degrees.
    pub margin_45: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub unit: RateUnit,
    pub channel: ChannelConfig,
    pub settings: Settings,
    pub outer: BoundaryReport,
    pub convexification: ConvexificationReport,
    pub inner: Vec<VertexReport>,
    pub time_sharing: BoundaryReport,
    pub gap: GapMetrics,
    pub segments: SegmentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub unit: RateUnit,
    pub channel: ChannelConfig,
    pub segments: SegmentReport,
}

/// Converts every rate of a segment report from bits to `unit`.
pub fn segments_in(mut r: SegmentReport, unit: RateUnit) -> SegmentReport {
    let scale = |s: &mut UserSegment| {
        let f = |v: f64| unit.from_bits(v);
        s.rate = s.rate.map(f);
        s.a_rate = s.a_rate.map(f);
        s.c_rate = s.c_rate.map(f);
        s.witness.dpc_rate = f(s.witness.dpc_rate);
        let e = &mut s.witness.evidence;
        e.f_dpc = f(e.f_dpc);
        e.g_dpc = f(e.g_dpc);
        e.f_cancel = f(e.f_cancel);
        e.g_cancel = f(e.g_cancel);
    };
    scale(&mut r.user1);
    scale(&mut r.user2);
    r
}

/// One strategy of the Monte Carlo grid and its comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCase {
    pub strategy: helpercap_core::HelperStrategy,
    pub report: McReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub channel: ChannelConfig,
    pub samples: usize,
    pub seed: u64,
    pub tol_rel: f64,
    pub max_rel_error: f64,
    pub pass: bool,
    pub cases: Vec<McCase>,
}
