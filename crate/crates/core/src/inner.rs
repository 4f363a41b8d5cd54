//! Inner bound: direction-wise optimization of achievable rate pairs over helper
//! strategies, decoder-order swap, time-sharing closure and the time-sharing
//! baseline.
//!
//! The search runs over `(rho1, rho2, gamma, alpha.., power fraction)`. The
//! helper may use less than its full budget; with a full-power split the helper
//! signal always interferes with at least one receiver, so the state-free
//! corner point would otherwise be out of reach. User `k`'s rate depends on its
//! own coefficients only, so for fixed `(rho, gamma, power)` each user's
//! coefficients are chosen independently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    alpha_star_cancel, alpha_star_dpc, pp_helper_rate, user_rate_unchecked,
};
use crate::error::{Error, Result};
use crate::gaussian::sequential_rates;
use crate::model::{
    beta_from_rho, ChannelConfig, CorrelationPoint, HelperStrategy, RatePair, User, UserAlpha,
};
use crate::optim::{golden_max, nelder_mead, SimplexOptions};
use crate::region::{Provenance, RegionBoundary, Vertex};

pub use crate::model::role_swap;

/// Effort spent by the strategy search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerBudget {
    /// Seed points per correlation axis.
    pub rho_grid: usize,
    /// Seed points for the power split.
    pub gamma_grid: usize,
    /// Iteration cap of each local simplex run.
    pub max_iters: usize,
    /// Number of best seeds refined locally.
    pub restarts: usize,
    /// Iterations of each one-dimensional coefficient search.
    pub line_iters: usize,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget {
            rho_grid: 9,
            gamma_grid: 9,
            max_iters: 400,
            restarts: 4,
            line_iters: 48,
        }
    }
}

impl OptimizerBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho_grid", self.rho_grid),
            ("gamma_grid", self.gamma_grid),
            ("max_iters", self.max_iters),
            ("restarts", self.restarts),
            ("line_iters", self.line_iters),
        ];
        for (name, value) in fields {
            if value == 0 {
                return Err(Error::InvalidParameter(format!("budget.{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Rate pair of a strategy: `(max(0, min(f1, g1)), max(0, min(f2, g2)))`.
pub fn achievable_point(cfg: &ChannelConfig, strat: &HelperStrategy) -> Result<RatePair> {
    strat.validate(cfg)?;
    Ok(point_unchecked(cfg, strat))
}

fn point_unchecked(cfg: &ChannelConfig, s: &HelperStrategy) -> RatePair {
    RatePair::new(
        user_rate_unchecked(User::One, cfg, s),
        user_rate_unchecked(User::Two, cfg, s),
    )
}

/// Best coefficients of user `k` for the correlations and split of `base`:
/// the better of the dirty-paper choice, the full-alignment choice, a constant
/// auxiliary and a line search between the first two.
pub(crate) fn best_alpha(
    k: User,
    cfg: &ChannelConfig,
    base: &HelperStrategy,
    iters: usize,
) -> (UserAlpha, f64) {
    let rate = |alpha: &UserAlpha| user_rate_unchecked(k, cfg, &base.with_alpha(*alpha));
    let a = alpha_star_dpc(k, cfg, base.beta(), base.gamma);
    let b = alpha_star_cancel(k, cfg, base.beta());
    let mut best = (base.alpha(k), rate(&base.alpha(k)));
    for cand in [a, b, UserAlpha::zero(k)] {
        let v = rate(&cand);
        if v > best.1 {
            best = (cand, v);
        }
    }
    let (t, v) = golden_max(|t| rate(&a.lerp(&b, t)), 0.0, 1.0, iters);
    if v > best.1 {
        best = (a.lerp(&b, t), v);
    }
    best
}

/// An optimized strategy together with its rate pair in the original channel's
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub rate: RatePair,
    pub strategy: HelperStrategy,
    /// Power actually spent by the helper.
    pub helper_power: f64,
    /// Whether the strategy is expressed for the role-swapped channel.
    pub swapped: bool,
}

impl OperatingPoint {
    /// Channel in which `strategy` is to be evaluated.
    pub fn effective_config(&self, cfg: &ChannelConfig) -> Result<ChannelConfig> {
        let base = if self.swapped { role_swap(cfg) } else { *cfg };
        base.with_helper_power(self.helper_power)
    }

    /// Rate pair recomputed from mutual informations of the joint covariance.
    pub fn oracle_rate(&self, cfg: &ChannelConfig) -> Result<RatePair> {
        let r = sequential_rates(&self.effective_config(cfg)?, &self.strategy)?;
        Ok(if self.swapped { r.swapped() } else { r })
    }

    pub fn vertex(&self) -> Vertex {
        Vertex {
            rate: self.rate,
            provenance: Provenance::Strategy {
                strategy: self.strategy,
                helper_power: self.helper_power,
                swapped: self.swapped,
            },
        }
    }

    fn swap(mut self) -> Self {
        self.rate = self.rate.swapped();
        self.swapped = !self.swapped;
        self
    }
}

const DIMS: usize = 9;

/// Search-space coordinates: `rho1, rho2, gamma, alpha11, alpha12, alpha20,
/// alpha21, alpha22, power fraction`.
type Params = [f64; DIMS];

struct Decoded {
    cfg: ChannelConfig,
    strategy: HelperStrategy,
    helper_power: f64,
}

fn decode(cfg: &ChannelConfig, x: &[f64]) -> Option<Decoded> {
    let fraction = x[8].clamp(0.0, 1.0);
    let helper_power = fraction * cfg.p0();
    let eff = cfg.with_helper_power(helper_power).ok()?;
    let rho = CorrelationPoint::projected(x[0], x[1]);
    let strategy = HelperStrategy::new(
        [x[3], x[4]],
        [x[5], x[6], x[7]],
        beta_from_rho(&eff, &rho),
        x[2].clamp(0.0, 1.0),
    );
    strategy.validate(&eff).ok()?;
    Some(Decoded {
        cfg: eff,
        strategy,
        helper_power,
    })
}

fn encode(cfg: &ChannelConfig, s: &HelperStrategy, helper_power: f64) -> Params {
    let rho = if helper_power > 0.0 {
        let q = |k: User| cfg.q(k);
        let r = |b: f64, q: f64| if q > 0.0 { b * (q / helper_power).sqrt() } else { 0.0 };
        (r(s.beta1, q(User::One)), r(s.beta2, q(User::Two)))
    } else {
        (0.0, 0.0)
    };
    let fraction = if cfg.p0() > 0.0 { helper_power / cfg.p0() } else { 0.0 };
    [
        rho.0, rho.1, s.gamma, s.alpha11, s.alpha12, s.alpha20, s.alpha21, s.alpha22, fraction,
    ]
}

/// Strategy with both users' coefficients chosen by [`best_alpha`].
fn with_best_alphas(d: &Decoded, iters: usize) -> (HelperStrategy, RatePair) {
    let (a1, r1) = best_alpha(User::One, &d.cfg, &d.strategy, iters);
    let (a2, r2) = best_alpha(User::Two, &d.cfg, &d.strategy, iters);
    (d.strategy.with_alpha(a1).with_alpha(a2), RatePair::new(r1, r2))
}

#[derive(Debug, Clone, Copy)]
struct Seed {
    x: Params,
    rate: RatePair,
}

/// Direction-independent starting points for one channel.
pub struct SeedTable {
    cfg: ChannelConfig,
    budget: OptimizerBudget,
    seeds: Vec<Seed>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl SeedTable {
    pub fn build(cfg: &ChannelConfig, budget: &OptimizerBudget) -> Self {
        let mut grid: Vec<Params> = Vec::new();
        let rhos = linspace(-1.0, 1.0, budget.rho_grid.max(2) | 1);
        let gammas = linspace(0.0, 1.0, budget.gamma_grid.max(2));
        for &r1 in &rhos {
            for &r2 in &rhos {
                if r1 * r1 + r2 * r2 > 1.0 + 1e-12 {
                    continue;
                }
                for &g in &gammas {
                    grid.push([r1, r2, g, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
                }
            }
        }
        // helper silent
        grid.push([0.0; DIMS]);

        let mut seeds: Vec<Seed> = grid
            .par_iter()
            .filter_map(|x| {
                let d = decode(cfg, x)?;
                let (s, rate) = with_best_alphas(&d, budget.line_iters);
                Some(Seed {
                    x: encode(cfg, &s, d.helper_power),
                    rate,
                })
            })
            .collect();

        // single-user optima, completed with the best coefficients of the other user
        for k in User::BOTH {
            let pp = pp_helper_rate(k, cfg, budget);
            let x = encode(cfg, &pp.strategy, cfg.p0());
            if let Some(d) = decode(cfg, &x) {
                let other = k.other();
                let (alpha, _) = best_alpha(other, &d.cfg, &pp.strategy, budget.line_iters);
                let s = pp.strategy.with_alpha(alpha);
                seeds.push(Seed {
                    x: encode(cfg, &s, cfg.p0()),
                    rate: point_unchecked(&d.cfg, &s),
                });
            }
        }

        SeedTable {
            cfg: *cfg,
            budget: *budget,
            seeds,
        }
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Best rate pair found for the weighted sum `cos(theta) r1 + sin(theta) r2`.
    pub fn optimize(&self, theta: f64) -> OperatingPoint {
        let cfg = &self.cfg;
        let mut ranked: Vec<&Seed> = self.seeds.iter().collect();
        ranked.sort_by(|a, b| b.rate.scalarize(theta).total_cmp(&a.rate.scalarize(theta)));

        let objective = |x: &[f64]| match decode(cfg, x) {
            Some(d) => point_unchecked(&d.cfg, &d.strategy).scalarize(theta),
            None => f64::NEG_INFINITY,
        };
        let opts = SimplexOptions {
            max_iters: self.budget.max_iters,
            ..Default::default()
        };

        let mut best: Option<(f64, OperatingPoint)> = None;
        let mut consider = |x: &[f64], polish: bool| {
            let Some(d) = decode(cfg, x) else { return };
            let (strategy, rate) = if polish {
                with_best_alphas(&d, self.budget.line_iters)
            } else {
                (d.strategy, point_unchecked(&d.cfg, &d.strategy))
            };
            let value = rate.scalarize(theta);
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((
                    value,
                    OperatingPoint {
                        rate,
                        strategy,
                        helper_power: d.helper_power,
                        swapped: false,
                    },
                ));
            }
        };
        for seed in ranked.iter().take(self.budget.restarts) {
            consider(&seed.x, false);
            let m = nelder_mead(objective, &seed.x, opts);
            consider(&m.x, false);
            consider(&m.x, true);
        }
        match best {
            Some((_, p)) => p,
            None => silent_point(cfg),
        }
    }
}

fn silent_point(cfg: &ChannelConfig) -> OperatingPoint {
    let strategy = HelperStrategy::default();
    let eff = cfg.with_helper_power(0.0).unwrap_or(*cfg);
    OperatingPoint {
        rate: point_unchecked(&eff, &strategy),
        strategy,
        helper_power: 0.0,
        swapped: false,
    }
}

/// Best strategy for the weighted-sum direction `theta`.
pub fn optimize_direction(
    cfg: &ChannelConfig,
    theta: f64,
    budget: &OptimizerBudget,
) -> OperatingPoint {
    SeedTable::build(cfg, budget).optimize(theta)
}

/// Direction angles strictly inside `(0, pi/2)`.
pub fn directions(resolution: usize) -> Vec<f64> {
    let n = resolution.max(1);
    (0..n)
        .map(|i| (i as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / n as f64)
        .collect()
}

/// All operating points that enter the inner hull: direction optima for both
/// decoding orders, the single-user optima and the silent helper.
pub fn inner_operating_points(
    cfg: &ChannelConfig,
    resolution: usize,
    budget: &OptimizerBudget,
) -> Vec<OperatingPoint> {
    let swapped_cfg = role_swap(cfg);
    let (table, swapped_table) = rayon::join(
        || SeedTable::build(cfg, budget),
        || SeedTable::build(&swapped_cfg, budget),
    );
    let thetas = directions(resolution);
    let jobs: Vec<(bool, f64)> = [false, true]
        .iter()
        .flat_map(|&sw| thetas.iter().map(move |&t| (sw, t)))
        .collect();
    let mut points: Vec<OperatingPoint> = jobs
        .par_iter()
        .map(|&(sw, theta)| {
            if sw {
                swapped_table.optimize(theta).swap()
            } else {
                table.optimize(theta)
            }
        })
        .collect();

    for k in User::BOTH {
        let pp = pp_helper_rate(k, cfg, budget);
        let x = encode(cfg, &pp.strategy, cfg.p0());
        if let Some(d) = decode(cfg, &x) {
            let (strategy, rate) = with_best_alphas(&d, budget.line_iters);
            points.push(OperatingPoint {
                rate,
                strategy,
                helper_power: d.helper_power,
                swapped: false,
            });
        }
    }
    points.push(silent_point(cfg));
    points
}

/// Time-sharing closure of the inner-bound operating points.
pub fn inner_region_boundary(
    cfg: &ChannelConfig,
    resolution: usize,
    budget: &OptimizerBudget,
) -> RegionBoundary {
    RegionBoundary::hull(
        inner_operating_points(cfg, resolution, budget)
            .iter()
            .map(OperatingPoint::vertex)
            .collect(),
    )
}

/// Baseline where the helper serves one user at a time and the other user is
/// silent: the segment between the two single-user helper rates.
pub fn time_sharing_boundary(
    cfg: &ChannelConfig,
    resolution: usize,
    budget: &OptimizerBudget,
) -> RegionBoundary {
    let a = pp_helper_rate(User::One, cfg, budget).rate;
    let b = pp_helper_rate(User::Two, cfg, budget).rate;
    let n = resolution.max(2);
    RegionBoundary::pareto(
        linspace(0.0, 1.0, n)
            .into_iter()
            .map(|lambda| Vertex {
                rate: RatePair::new(lambda * a, (1.0 - lambda) * b),
                provenance: Provenance::TimeSharing { lambda },
            })
            .collect(),
    )
}
