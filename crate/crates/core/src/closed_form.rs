//! Closed-form rate expressions of the Gaussian inner bound.
//!
//! `f_k` is the Gel'fand-Pinsker term `I(U_k, X_k; Y_k) - I(U_k; conditioning)`
//! and `g_k` is `I(X_k; Y_k | U_k)`. For user 2 the conditioning set contains
//! user 1's auxiliary, which strips the `X01'` component out of `V`; the
//! numerator of `f_2` therefore carries the helper share `1 - gamma`.
//!
//! Degenerate inputs never produce NaN. A constant auxiliary (variance at most
//! [`DEGENERATE_EPS`]) yields the state-as-noise limit
//! `1/2 log2(sigma2_Y / sigma2_Y|X)` for both `f` and `g`. A non-constant
//! auxiliary without any helper component is a function of the state; its
//! Gel'fand-Pinsker term diverges to `-inf` and is reported as rate 0.
//!
//! The `f_2` closed form assumes `eta1 != 0` whenever `gamma > 0`: with a
//! zero gain user 1's auxiliary carries no `X01'` and the exact term exceeds
//! the closed form (which stays achievable).

use serde::Serialize;

use crate::error::Result;
use crate::inner::{best_alpha, OptimizerBudget};
use crate::model::{
    beta_from_rho, half_log2, rho_from_beta, ChannelConfig, CorrelationPoint, HelperStrategy,
    User, UserAlpha,
};
use crate::optim::{nelder_mead, SimplexOptions};

pub const DEGENERATE_EPS: f64 = 1e-12;

/// Variances and covariances entering the closed forms, in linear power units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderStats {
    pub sigma2_y1: f64,
    pub sigma2_y2: f64,
    pub sigma2_y1_given_x1: f64,
    pub sigma2_y2_given_x2: f64,
    pub sigma2_u1: f64,
    pub sigma2_u2: f64,
    pub sigma_u1y1: f64,
    pub sigma_u2y2: f64,
    pub h1: f64,
    pub h2: f64,
}

impl SecondOrderStats {
    pub fn sigma2_y(&self, k: User) -> f64 {
        match k {
            User::One => self.sigma2_y1,
            User::Two => self.sigma2_y2,
        }
    }

    pub fn sigma2_y_given_x(&self, k: User) -> f64 {
        match k {
            User::One => self.sigma2_y1_given_x1,
            User::Two => self.sigma2_y2_given_x2,
        }
    }

    pub fn sigma2_u(&self, k: User) -> f64 {
        match k {
            User::One => self.sigma2_u1,
            User::Two => self.sigma2_u2,
        }
    }

    pub fn sigma_uy(&self, k: User) -> f64 {
        match k {
            User::One => self.sigma_u1y1,
            User::Two => self.sigma_u2y2,
        }
    }

    pub fn h(&self, k: User) -> f64 {
        match k {
            User::One => self.h1,
            User::Two => self.h2,
        }
    }
}

pub fn second_order_stats(cfg: &ChannelConfig, s: &HelperStrategy) -> Result<SecondOrderStats> {
    s.validate(cfg)?;
    Ok(stats_unchecked(cfg, s))
}

fn stats_unchecked(cfg: &ChannelConfig, s: &HelperStrategy) -> SecondOrderStats {
    let (e1, e2) = (cfg.eta(User::One), cfg.eta(User::Two));
    let (q1, q2) = (cfg.q(User::One), cfg.q(User::Two));
    let p0 = cfg.p0();
    let p0p = s.p0_prime(cfg);
    let (g, gb) = (s.gamma, s.gamma_bar());

    let y_given_x = |e: f64, b: f64, q: f64| e * e * p0 + (2.0 * b * e + 1.0) * q + 1.0;
    let sigma2_y1_given_x1 = y_given_x(e1, s.beta1, q1);
    let sigma2_y2_given_x2 = y_given_x(e2, s.beta2, q2);
    let sigma2_y1 = sigma2_y1_given_x1 + cfg.p(User::One);
    let sigma2_y2 = sigma2_y2_given_x2 + cfg.p(User::Two);

    let sigma2_u1 = e1 * e1 * g * p0p + s.alpha11 * s.alpha11 * q1 + s.alpha12 * s.alpha12 * q2;
    let sigma2_u2 = e2 * e2 * (gb + s.alpha20 * s.alpha20 * g) * p0p
        + s.alpha21 * s.alpha21 * q1
        + s.alpha22 * s.alpha22 * q2;
    let sigma_u1y1 =
        e1 * e1 * g * p0p + (1.0 + s.beta1 * e1) * s.alpha11 * q1 + s.alpha12 * s.beta2 * e1 * q2;
    let sigma_u2y2 = e2 * e2 * (gb * p0p + s.alpha20 * g * p0p)
        + s.alpha22 * q2 * (1.0 + s.beta2 * e2)
        + s.alpha21 * s.beta1 * e2 * q1;

    SecondOrderStats {
        sigma2_y1,
        sigma2_y2,
        sigma2_y1_given_x1,
        sigma2_y2_given_x2,
        sigma2_u1,
        sigma2_u2,
        sigma_u1y1,
        sigma_u2y2,
        h1: sigma2_y1_given_x1 * sigma2_u1 - sigma_u1y1 * sigma_u1y1,
        h2: sigma2_y2_given_x2 * sigma2_u2 - sigma_u2y2 * sigma_u2y2,
    }
}

/// Helper power share reserved for user `k`'s auxiliary.
fn share(k: User, gamma: f64) -> f64 {
    match k {
        User::One => gamma,
        User::Two => 1.0 - gamma,
    }
}

fn f_from_stats(k: User, cfg: &ChannelConfig, s: &HelperStrategy, st: &SecondOrderStats) -> f64 {
    let (su, h) = (st.sigma2_u(k), st.h(k));
    if su <= DEGENERATE_EPS || h <= DEGENERATE_EPS {
        return half_log2(st.sigma2_y(k) / st.sigma2_y_given_x(k));
    }
    let eta = cfg.eta(k);
    let num = eta * eta * share(k, s.gamma) * s.p0_prime(cfg);
    if num <= DEGENERATE_EPS {
        return 0.0;
    }
    half_log2(num * st.sigma2_y(k) / h)
}

fn g_from_stats(k: User, cfg: &ChannelConfig, st: &SecondOrderStats) -> f64 {
    let (su, h) = (st.sigma2_u(k), st.h(k));
    if su <= DEGENERATE_EPS || h <= DEGENERATE_EPS {
        return half_log2(1.0 + cfg.p(k) / st.sigma2_y_given_x(k));
    }
    half_log2(1.0 + cfg.p(k) * su / h)
}

/// Gel'fand-Pinsker rate term `f_k` in bits (before clamping at zero).
pub fn rate_f(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> Result<f64> {
    let st = second_order_stats(cfg, s)?;
    Ok(f_from_stats(k, cfg, s, &st))
}

/// Conditional rate term `g_k` in bits.
pub fn rate_g(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> Result<f64> {
    let st = second_order_stats(cfg, s)?;
    Ok(g_from_stats(k, cfg, &st))
}

/// `(f_k, g_k)` from a single stats evaluation.
pub fn rate_fg(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> Result<(f64, f64)> {
    let st = second_order_stats(cfg, s)?;
    Ok((f_from_stats(k, cfg, s, &st), g_from_stats(k, cfg, &st)))
}

/// Achievable rate of user `k`: `max(0, min(f_k, g_k))`.
pub fn user_rate(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> Result<f64> {
    let (f, g) = rate_fg(k, cfg, s)?;
    Ok(f.min(g).max(0.0))
}

/// Same as [`user_rate`] for strategies already known to be valid.
pub(crate) fn user_rate_unchecked(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> f64 {
    let st = stats_unchecked(cfg, s);
    f_from_stats(k, cfg, s, &st)
        .min(g_from_stats(k, cfg, &st))
        .max(0.0)
}

fn p0_prime_of(cfg: &ChannelConfig, beta: [f64; 2]) -> f64 {
    HelperStrategy::new([0.0; 2], [0.0; 3], beta, 0.0).p0_prime(cfg)
}

/// Coefficients that maximize `f_k` for the given cancellation and split.
pub fn alpha_star_dpc(k: User, cfg: &ChannelConfig, beta: [f64; 2], gamma: f64) -> UserAlpha {
    let p0p = p0_prime_of(cfg, beta);
    match k {
        User::One => {
            let e = cfg.eta(User::One);
            let d = e * e * p0p + 1.0;
            UserAlpha::One([
                (1.0 + e * beta[0]) * e * e * gamma * p0p / d,
                beta[1] * e.powi(3) * gamma * p0p / d,
            ])
        }
        User::Two => {
            let e = cfg.eta(User::Two);
            let w = e * e * (1.0 - gamma) * p0p;
            let d = w + 1.0;
            UserAlpha::Two([w / d, beta[0] * e * w / d, (1.0 + e * beta[1]) * w / d])
        }
    }
}

/// Coefficients that align the auxiliary with the full interference seen by
/// receiver `k`, making `g_k` insensitive to the state.
pub fn alpha_star_cancel(k: User, cfg: &ChannelConfig, beta: [f64; 2]) -> UserAlpha {
    match k {
        User::One => {
            let e = cfg.eta(User::One);
            UserAlpha::One([1.0 + e * beta[0], e * beta[1]])
        }
        User::Two => {
            let e = cfg.eta(User::Two);
            UserAlpha::Two([1.0, e * beta[0], 1.0 + e * beta[1]])
        }
    }
}

/// `f_k` evaluated at [`alpha_star_dpc`], written through the correlation
/// coefficients.
pub fn reduced_f(k: User, cfg: &ChannelConfig, beta: [f64; 2], gamma: f64) -> Result<f64> {
    HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma).validate(cfg)?;
    let rho = if cfg.p0() > 0.0 {
        rho_from_beta(cfg, beta[0], beta[1])?
    } else {
        CorrelationPoint::default()
    };
    let p0 = cfg.p0();
    let p0p = p0_prime_of(cfg, beta);
    let (eta, q) = (cfg.eta(k), cfg.q(k));
    let residual = eta * eta * p0 + 2.0 * eta * rho.get(k) * (p0 * q).sqrt() + q + 1.0;
    let first = half_log2(1.0 + cfg.p(k) / residual);
    let e2 = eta * eta;
    let second = match k {
        User::One => half_log2(1.0 + e2 * gamma * p0p / (1.0 + e2 * (1.0 - gamma) * p0p)),
        User::Two => half_log2(1.0 + e2 * (1.0 - gamma) * p0p),
    };
    Ok(first + second)
}

/// Best single-user helper-assisted rate together with a strategy achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleUserRate {
    pub rate: f64,
    pub strategy: HelperStrategy,
}

/// Rate of user `k` when the whole helper serves it alone: `gamma = 1` for
/// user 1, `gamma = 0` for user 2, the other user's cancellation off.
pub fn pp_helper_rate(k: User, cfg: &ChannelConfig, budget: &OptimizerBudget) -> SingleUserRate {
    let gamma = match k {
        User::One => 1.0,
        User::Two => 0.0,
    };
    let strategy_at = |rho_k: f64| {
        let rho = match k {
            User::One => CorrelationPoint::projected(rho_k.clamp(-1.0, 1.0), 0.0),
            User::Two => CorrelationPoint::projected(0.0, rho_k.clamp(-1.0, 1.0)),
        };
        HelperStrategy::new([0.0; 2], [0.0; 3], beta_from_rho(cfg, &rho), gamma)
    };
    let with_best_alpha = |rho_k: f64| {
        let base = strategy_at(rho_k);
        let (alpha, rate) = best_alpha(k, cfg, &base, budget.line_iters);
        (base.with_alpha(alpha), rate)
    };

    // coarse scan over the correlation with the user's own state
    let n = 4 * budget.rho_grid.max(2) + 1;
    let mut scored: Vec<(f64, HelperStrategy, f64)> = (0..n)
        .map(|i| {
            let rho_k = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let (s, r) = with_best_alpha(rho_k);
            (rho_k, s, r)
        })
        .collect();
    scored.sort_by(|a, b| b.2.total_cmp(&a.2));

    let mut best = SingleUserRate {
        rate: scored[0].2,
        strategy: scored[0].1,
    };
    let opts = SimplexOptions {
        max_iters: budget.max_iters,
        step: 0.05,
        ..Default::default()
    };
    for (rho_k, s, _) in scored.iter().take(budget.restarts.max(1)) {
        let mut start = vec![*rho_k];
        start.extend_from_slice(s.alpha(k).as_slice());
        let objective = |x: &[f64]| {
            let cand = strategy_at(x[0]).with_alpha(UserAlpha::from_slice(k, &x[1..]));
            user_rate_unchecked(k, cfg, &cand)
        };
        let m = nelder_mead(objective, &start, opts);
        if m.value > best.rate {
            let cand = strategy_at(m.x[0]).with_alpha(UserAlpha::from_slice(k, &m.x[1..]));
            best = SingleUserRate {
                rate: m.value,
                strategy: cand,
            };
        }
    }
    // re-polish the coefficients at the final correlation
    let (alpha, rate) = best_alpha(k, cfg, &best.strategy, budget.line_iters);
    if rate > best.rate {
        best = SingleUserRate {
            rate,
            strategy: best.strategy.with_alpha(alpha),
        };
    }
    best
}
