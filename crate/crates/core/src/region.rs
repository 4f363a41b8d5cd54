//! Pareto polylines describing the upper-right frontier of a rate region.
//!
//! A boundary with vertices `v_0, .., v_m` (r1 strictly increasing, r2 strictly
//! decreasing) describes the set of pairs lying below the piecewise-linear
//! interpolation of the vertices, extended horizontally to the `r2` axis and
//! vertically down to the `r1` axis.

use serde::{Deserialize, Serialize};

use crate::model::{CorrelationPoint, HelperStrategy, RatePair};

/// How a vertex was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// A single inner-bound strategy. `helper_power` is the power the helper
    /// actually spends; when `swapped` is set the strategy refers to the
    /// role-swapped channel and its rate pair is exchanged.
    Strategy {
        strategy: HelperStrategy,
        helper_power: f64,
        swapped: bool,
    },
    /// Time sharing between the two single-user helper strategies, with user 1
    /// served a fraction `lambda` of the time.
    TimeSharing { lambda: f64 },
    /// Outer-bound point for the given helper/state correlations.
    Correlation { rho: CorrelationPoint },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub rate: RatePair,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionBoundary {
    vertices: Vec<Vertex>,
}

impl RegionBoundary {
    /// Pareto frontier of the given vertices. Among points with equal `r2`
    /// the rightmost survives; among equal `r1` the topmost.
    pub fn pareto(mut candidates: Vec<Vertex>) -> Self {
        candidates.retain(|v| v.rate.r1.is_finite() && v.rate.r2.is_finite());
        candidates.sort_by(|a, b| {
            b.rate
                .r1
                .total_cmp(&a.rate.r1)
                .then(b.rate.r2.total_cmp(&a.rate.r2))
        });
        let mut kept: Vec<Vertex> = Vec::with_capacity(candidates.len());
        for v in candidates {
            if kept.last().is_none_or(|last| v.rate.r2 > last.rate.r2) {
                kept.push(v);
            }
        }
        kept.reverse();
        RegionBoundary { vertices: kept }
    }

    /// Upper concave hull (time-sharing closure) of the given vertices. Hull
    /// vertices are a subset of the inputs, so provenance is preserved.
    pub fn hull(candidates: Vec<Vertex>) -> Self {
        let front = Self::pareto(candidates).vertices;
        let mut hull: Vec<Vertex> = Vec::with_capacity(front.len());
        for v in front {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2].rate;
                let b = hull[hull.len() - 1].rate;
                let c = v.rate;
                let cross = (b.r1 - a.r1) * (c.r2 - a.r2) - (b.r2 - a.r2) * (c.r1 - a.r1);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(v);
        }
        RegionBoundary { vertices: hull }
    }

    /// Boundary built from plain points whose provenance is irrelevant.
    pub fn from_rates(points: &[RatePair], provenance: Provenance) -> Self {
        Self::pareto(
            points
                .iter()
                .map(|&rate| Vertex { rate, provenance })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn points(&self) -> Vec<RatePair> {
        self.vertices.iter().map(|v| v.rate).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.rate.r1)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices.first().map_or(0.0, |v| v.rate.r2)
    }

    /// Largest `r2` in the region at abscissa `r1`, or `None` beyond the
    /// rightmost vertex.
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        let last = self.vertices.last()?;
        if r1 > last.rate.r1 {
            return None;
        }
        let i = self.vertices.partition_point(|v| v.rate.r1 < r1);
        if i == 0 {
            return Some(self.vertices[0].rate.r2);
        }
        let (a, b) = (self.vertices[i - 1].rate, self.vertices[i].rate);
        if b.r1 == r1 {
            return Some(b.r2);
        }
        let t = (r1 - a.r1) / (b.r1 - a.r1);
        Some(a.r2 + t * (b.r2 - a.r2))
    }

    /// Whether `p` lies in the region, allowing a slack of `tol` per coordinate.
    pub fn contains(&self, p: RatePair, tol: f64) -> bool {
        let q1 = (p.r1 - tol).max(0.0);
        let q2 = (p.r2 - tol).max(0.0);
        if self.vertices.is_empty() {
            return q1 == 0.0 && q2 == 0.0;
        }
        match self.value_at(q1) {
            Some(v) => q2 <= v.max(0.0),
            None => false,
        }
    }

    /// Support function `max cos(theta) r1 + sin(theta) r2` over the region,
    /// for `theta` in `[0, pi/2]`.
    pub fn support(&self, theta: f64) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.rate.scalarize(theta))
            .fold(0.0, f64::max)
    }

    /// Largest amount by which any vertex of `self` sticks out of `other`
    /// along the diagonal direction, zero when `self` is inside `other`.
    pub fn excess_over(&self, other: &RegionBoundary) -> f64 {
        let mut worst: f64 = 0.0;
        for v in &self.vertices {
            if other.contains(v.rate, 0.0) {
                continue;
            }
            // bisection on the uniform slack needed for containment
            let (mut lo, mut hi) = (0.0, v.rate.r1.max(v.rate.r2));
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if other.contains(v.rate, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            worst = worst.max(hi);
        }
        worst
    }

    /// The same boundary in the role-swapped coordinate system.
    pub fn swapped(&self) -> Self {
        Self::pareto(
            self.vertices
                .iter()
                .map(|v| Vertex {
                    rate: v.rate.swapped(),
                    provenance: v.provenance,
                })
                .collect(),
        )
    }
}

/// Free-function form of [`RegionBoundary::contains`].
pub fn region_contains(boundary: &RegionBoundary, p: RatePair, tol: f64) -> bool {
    boundary.contains(p, tol)
}
