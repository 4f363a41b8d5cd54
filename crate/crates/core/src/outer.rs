//! Outer bound: a union over helper/state correlations `rho` in the unit disk
//! of the boxes `{R1 <= ub1(rho), R2 <= ub2(rho)}`.
//!
//! The frontier is traced exactly up to one-dimensional searches. For a fixed
//! radius `r = |rho|` the second log term of both bounds is fixed, user 1's
//! first term depends only on `rho1` and user 2's only on `rho2`. Requiring
//! `ub1 >= t` confines `rho1` to an interval; user 2 is best served by the
//! point of that interval closest to zero, leaving the largest `|rho2|` with
//! the sign that shrinks user 2's interference. What remains is a maximization
//! over `r` for each level `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{half_log2, ChannelConfig, CorrelationPoint, RatePair, User};
use crate::optim::scan_then_golden;
use crate::region::{Provenance, RegionBoundary, Vertex};

/// Both user bounds at one correlation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterPoint {
    pub rho: CorrelationPoint,
    pub ub1: f64,
    pub ub2: f64,
}

impl OuterPoint {
    pub fn rate(&self) -> RatePair {
        RatePair::new(self.ub1, self.ub2)
    }
}

/// `(eta_k^2 p0, eta_k sqrt(p0 q_k))`: the helper power seen at receiver `k`
/// and the helper/state cross term per unit correlation.
fn coefficients(cfg: &ChannelConfig, k: User) -> (f64, f64) {
    let eta = cfg.eta(k);
    (eta * eta * cfg.p0(), eta * (cfg.p0() * cfg.q(k)).sqrt())
}

fn first_term_raw(cfg: &ChannelConfig, k: User, rho_k: f64, r2: f64) -> f64 {
    let (c, b) = coefficients(cfg, k);
    let interference = c + 2.0 * b * rho_k + cfg.q(k) + 1.0;
    half_log2(1.0 + cfg.p(k) / interference) + half_log2((1.0 - r2).max(0.0) * c + 1.0)
}

/// The correlation-dependent term of user `k`'s bound (before the minimum with
/// the interference-free capacity).
pub fn outer_first_term(k: User, cfg: &ChannelConfig, rho: &CorrelationPoint) -> Result<f64> {
    rho.validate()?;
    let rho = effective(cfg, rho);
    Ok(first_term_raw(cfg, k, rho.get(k), rho.norm_sqr()))
}

pub fn outer_rate_bounds(cfg: &ChannelConfig, rho: &CorrelationPoint) -> Result<OuterPoint> {
    rho.validate()?;
    Ok(outer_point_unchecked(cfg, *rho))
}

/// Correlation with an absent state is meaningless and taken as zero.
fn effective(cfg: &ChannelConfig, rho: &CorrelationPoint) -> CorrelationPoint {
    let keep = |r: f64, k: User| if cfg.q(k) > 0.0 { r } else { 0.0 };
    CorrelationPoint::projected(keep(rho.rho1, User::One), keep(rho.rho2, User::Two))
}

fn outer_point_unchecked(cfg: &ChannelConfig, rho: CorrelationPoint) -> OuterPoint {
    let rho = effective(cfg, &rho);
    let r2 = rho.norm_sqr();
    let ub = |k: User| first_term_raw(cfg, k, rho.get(k), r2).min(cfg.awgn_rate(k));
    OuterPoint {
        rho,
        ub1: ub(User::One),
        ub2: ub(User::Two),
    }
}

/// Correlation with user 2's state that is best for user 2 given `|rho2|`.
fn favourable(b: f64, magnitude: f64) -> f64 {
    if b > 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

struct Tracer<'a> {
    cfg: &'a ChannelConfig,
    grid: usize,
    iters: usize,
    /// Radius of the largest user-1 bound, feasible for every attainable level.
    peak1: f64,
}

impl Tracer<'_> {
    /// Smallest `|rho1|` at radius `r` meeting `ub1 >= t`, if any.
    fn rho1_for_level(&self, t: f64, r: f64) -> Option<f64> {
        let cfg = self.cfg;
        if t > cfg.awgn_rate(User::One) {
            return None;
        }
        let (c1, b1) = coefficients(cfg, User::One);
        let tau = t - half_log2((1.0 - r * r).max(0.0) * c1 + 1.0);
        if tau <= 0.0 {
            return Some(0.0);
        }
        let target = (2f64.powf(2.0 * tau) - 1.0).max(f64::MIN_POSITIVE);
        let m = cfg.p(User::One) / target - (c1 + cfg.q(User::One) + 1.0);
        if b1 == 0.0 {
            return (m >= 0.0).then_some(0.0);
        }
        // feasible set is rho1 <= m/(2 b1) for b1 > 0, rho1 >= m/(2 b1) otherwise
        let edge = m / (2.0 * b1);
        let (lo, hi) = if b1 > 0.0 { (-r, edge.min(r)) } else { (edge.max(-r), r) };
        if lo > hi {
            return None;
        }
        Some(0.0f64.clamp(lo, hi))
    }

    fn point_at(&self, t: f64, r: f64) -> Option<OuterPoint> {
        let rho1 = self.rho1_for_level(t, r)?;
        let (_, b2) = coefficients(self.cfg, User::Two);
        let rho2 = favourable(b2, (r * r - rho1 * rho1).max(0.0).sqrt());
        let p = outer_point_unchecked(self.cfg, CorrelationPoint::projected(rho1, rho2));
        Some(p)
    }

    /// Best user-2 bound among correlations with `ub1 >= t`.
    ///
    /// Near the top level the feasible radii shrink to a narrow interval
    /// around the peak radius, which is bracketed first so that the scan does
    /// not miss it.
    fn best_for_level(&self, t: f64) -> Option<OuterPoint> {
        let feasible = |r: f64| self.rho1_for_level(t, r).is_some();
        let peak = self.peak1;
        if !feasible(peak) {
            return None;
        }
        let edge = |mut inside: f64, mut outside: f64| {
            if feasible(outside) {
                return outside;
            }
            for _ in 0..100 {
                let mid = 0.5 * (inside + outside);
                if mid == inside || mid == outside {
                    break;
                }
                if feasible(mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        let (lo, hi) = (edge(peak, 0.0), edge(peak, 1.0));
        let objective = |r: f64| self.point_at(t, r).map_or(f64::NEG_INFINITY, |p| p.ub2);
        let (r, v) = scan_then_golden(objective, lo, hi, self.grid, self.iters);
        let (r, _) = [(r, v), (lo, objective(lo)), (hi, objective(hi)), (peak, objective(peak))]
            .into_iter()
            .fold((peak, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        self.point_at(t, r)
    }

    /// Radius maximizing user `k`'s first term along its favourable axis.
    fn peak_radius(&self, k: User) -> f64 {
        let cfg = self.cfg;
        let (c, b) = coefficients(cfg, k);
        let value = |r: f64| first_term_raw(cfg, k, favourable(b, r), r * r);
        let (r, _) = scan_then_golden(value, 0.0, 1.0, self.grid, self.iters);
        // the golden search only resolves r to about sqrt(eps); finish on the
        // sign of the derivative
        let (p, q, bb) = (cfg.p(k), cfg.q(k), b.abs());
        let slope = |r: f64| {
            let d = c + q + 1.0 - 2.0 * bb * r;
            p * bb / (d * (d + p)) - r * c / ((1.0 - r * r) * c + 1.0)
        };
        let h = 1.0 / (self.grid - 1) as f64;
        let (mut lo, mut hi) = ((r - h).max(0.0), (r + h).min(1.0));
        if !(slope(lo) > 0.0 && slope(hi) < 0.0) {
            return r;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let best = if value(lo) >= value(hi) { lo } else { hi };
        if value(best) >= value(r) {
            best
        } else {
            r
        }
    }

    /// Point with the largest user-1 bound over the disk.
    fn max_level(&self) -> OuterPoint {
        let (_, b1) = coefficients(self.cfg, User::One);
        let r = self.peak1;
        outer_point_unchecked(self.cfg, CorrelationPoint::projected(favourable(b1, r), 0.0))
    }

    /// Point with the largest user-2 bound over the disk.
    fn max_second(&self) -> OuterPoint {
        let (_, b2) = coefficients(self.cfg, User::Two);
        let r = self.peak_radius(User::Two);
        outer_point_unchecked(self.cfg, CorrelationPoint::projected(0.0, favourable(b2, r)))
    }
}

const CHORD_TOL: f64 = 3e-10;
const MAX_DEPTH: usize = 40;

/// Frontier of the union of outer-bound boxes over the correlation disk.
///
/// `resolution` controls the initial number of levels and the radius scan;
/// levels are then bisected until the polyline is within `3e-10` of the traced
/// frontier between samples.
pub fn outer_region_boundary(cfg: &ChannelConfig, resolution: usize) -> RegionBoundary {
    let resolution = resolution.max(8);
    let mut tracer = Tracer {
        cfg,
        grid: 8 * resolution + 1,
        iters: 80,
        peak1: 0.0,
    };
    tracer.peak1 = tracer.peak_radius(User::One);
    let top = tracer.max_level();
    // every level below the user-1 bound of the best user-2 point yields that point
    let left = tracer.max_second();
    let (t0, t1) = (left.ub1.min(top.ub1), top.ub1);
    let n = 4 * resolution;
    let levels: Vec<f64> = (0..=n)
        .map(|i| if i == n { t1 } else { t0 + (t1 - t0) * i as f64 / n as f64 })
        .collect();
    let mut initial: Vec<(f64, Option<OuterPoint>)> = levels
        .par_iter()
        .map(|&t| (t, tracer.best_for_level(t)))
        .collect();
    // the topmost level is attained only at the maximizer itself
    if let Some(last) = initial.last_mut() {
        last.1.get_or_insert(top);
    }

    let mut samples: Vec<OuterPoint> = vec![left, top];
    for w in initial.windows(2) {
        let ((ta, pa), (tb, pb)) = (w[0], w[1]);
        if let Some(p) = pa {
            samples.push(p);
        }
        if let (Some(pa), Some(pb)) = (pa, pb) {
            refine(&tracer, ta, pa, tb, pb, 0, &mut samples);
        }
    }
    if let Some((_, Some(p))) = initial.last() {
        samples.push(*p);
    }

    RegionBoundary::pareto(
        samples
            .into_iter()
            .map(|p| Vertex {
                rate: p.rate(),
                provenance: Provenance::Correlation { rho: p.rho },
            })
            .collect(),
    )
}

fn refine(
    tracer: &Tracer,
    ta: f64,
    pa: OuterPoint,
    tb: f64,
    pb: OuterPoint,
    depth: usize,
    out: &mut Vec<OuterPoint>,
) {
    if depth >= MAX_DEPTH {
        return;
    }
    let tm = 0.5 * (ta + tb);
    let Some(pm) = tracer.best_for_level(tm) else {
        return;
    };
    let deviation = segment_distance(pa.rate(), pb.rate(), pm.rate());
    if deviation <= CHORD_TOL {
        return;
    }
    refine(tracer, ta, pa, tm, pm, depth + 1, out);
    out.push(pm);
    refine(tracer, tm, pm, tb, pb, depth + 1, out);
}

/// Euclidean distance from `m` to the segment `ab`.
fn segment_distance(a: RatePair, b: RatePair, m: RatePair) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((m.r1 - a.r1) * dx + (m.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (m.r1 - a.r1 - s * dx).hypot(m.r2 - a.r2 - s * dy)
}

/// Concave hull of an outer frontier together with the largest distance
/// between the two polylines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convexification {
    pub hull: RegionBoundary,
    pub is_convex: bool,
    pub gap: f64,
}

pub fn convexify(frontier: &RegionBoundary) -> Convexification {
    let hull = RegionBoundary::hull(frontier.vertices().to_vec());
    let gap = hull.excess_over(frontier);
    Convexification {
        is_convex: gap <= 1e-9,
        hull,
        gap,
    }
}
