//! Per-user partition of the parameter space into a dirty-paper-tight class
//! (A), a full-cancellation class (C) and an uncharacterized class (B).
//!
//! For user 1 the helper devotes its whole residual power to user 1
//! (`gamma = 1`); for user 2 it devotes it to user 2 (`gamma = 0`). In class A
//! the rate at the dirty-paper coefficients matches the correlation-dependent
//! term of the outer bound; in class C the user reaches its interference-free
//! capacity.

use serde::{Deserialize, Serialize};

use crate::closed_form::{alpha_star_cancel, alpha_star_dpc, rate_fg, reduced_f};
use crate::error::Result;
use crate::inner::OptimizerBudget;
use crate::model::{beta_from_rho, ChannelConfig, CorrelationPoint, HelperStrategy, User};
use crate::optim::{nelder_mead, SimplexOptions};

/// Equality tolerance when comparing `f` and `g`.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentClass {
    A,
    B,
    C,
}

/// `f` and `g` of one user at both special coefficient choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassEvidence {
    pub class: SegmentClass,
    pub f_dpc: f64,
    pub g_dpc: f64,
    pub f_cancel: f64,
    pub g_cancel: f64,
}

fn strategy_for(k: User, beta: [f64; 2], gamma: f64, cfg: &ChannelConfig, cancel: bool) -> HelperStrategy {
    let alpha = if cancel {
        alpha_star_cancel(k, cfg, beta)
    } else {
        alpha_star_dpc(k, cfg, beta, gamma)
    };
    HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma).with_alpha(alpha)
}

pub fn class_evidence(
    k: User,
    cfg: &ChannelConfig,
    beta: [f64; 2],
    gamma: f64,
) -> Result<ClassEvidence> {
    let (f_dpc, g_dpc) = rate_fg(k, cfg, &strategy_for(k, beta, gamma, cfg, false))?;
    let (f_cancel, g_cancel) = rate_fg(k, cfg, &strategy_for(k, beta, gamma, cfg, true))?;
    let class = if f_dpc <= g_dpc + TIE_TOL {
        SegmentClass::A
    } else if f_cancel + TIE_TOL >= g_cancel {
        SegmentClass::C
    } else {
        SegmentClass::B
    };
    Ok(ClassEvidence {
        class,
        f_dpc,
        g_dpc,
        f_cancel,
        g_cancel,
    })
}

pub fn classify(k: User, cfg: &ChannelConfig, beta: [f64; 2], gamma: f64) -> Result<SegmentClass> {
    Ok(class_evidence(k, cfg, beta, gamma)?.class)
}

/// Helper split used when characterizing user `k`'s segment.
pub fn segment_gamma(k: User) -> f64 {
    match k {
        User::One => 1.0,
        User::Two => 0.0,
    }
}

/// A witness correlation point with its class and candidate rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub rho: CorrelationPoint,
    pub beta: [f64; 2],
    pub evidence: ClassEvidence,
    /// The dirty-paper rate at this witness (meaningful in class A).
    pub dpc_rate: f64,
}

/// Characterized segment of one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserSegment {
    pub user: User,
    pub gamma: f64,
    pub class: SegmentClass,
    /// Characterized rate; `None` in class B.
    pub rate: Option<f64>,
    /// Best class-A rate over witnesses, if any witness is in class A.
    pub a_rate: Option<f64>,
    /// Interference-free capacity, if any witness is in class C.
    pub c_rate: Option<f64>,
    /// Witness supporting the reported class.
    pub witness: Witness,
    pub witnesses_a: usize,
    pub witnesses_b: usize,
    pub witnesses_c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub user1: UserSegment,
    pub user2: UserSegment,
}

impl SegmentReport {
    pub fn get(&self, k: User) -> &UserSegment {
        match k {
            User::One => &self.user1,
            User::Two => &self.user2,
        }
    }
}

fn witness_at(k: User, cfg: &ChannelConfig, rho: CorrelationPoint) -> Option<Witness> {
    let gamma = segment_gamma(k);
    let beta = beta_from_rho(cfg, &rho);
    let evidence = class_evidence(k, cfg, beta, gamma).ok()?;
    let dpc_rate = reduced_f(k, cfg, beta, gamma).ok()?;
    Some(Witness {
        rho,
        beta,
        evidence,
        dpc_rate,
    })
}

/// Classifies user `k` over a grid of correlation points and refines the best
/// class-A witness locally.
pub fn user_segment(k: User, cfg: &ChannelConfig, budget: &OptimizerBudget) -> UserSegment {
    let n = 4 * budget.rho_grid.max(2) + 1;
    let axis: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let mut witnesses: Vec<Witness> = Vec::new();
    for &r1 in &axis {
        for &r2 in &axis {
            if r1 * r1 + r2 * r2 > 1.0 + 1e-12 {
                continue;
            }
            if let Some(w) = witness_at(k, cfg, CorrelationPoint::projected(r1, r2)) {
                witnesses.push(w);
            }
        }
    }
    let count = |c: SegmentClass| witnesses.iter().filter(|w| w.evidence.class == c).count();
    let (na, nb, nc) = (count(SegmentClass::A), count(SegmentClass::B), count(SegmentClass::C));

    let mut best_a = witnesses
        .iter()
        .filter(|w| w.evidence.class == SegmentClass::A)
        .max_by(|a, b| a.dpc_rate.total_cmp(&b.dpc_rate))
        .copied();
    if let Some(start) = best_a {
        let objective = |x: &[f64]| {
            match witness_at(k, cfg, CorrelationPoint::projected(x[0], x[1])) {
                Some(w) if w.evidence.class == SegmentClass::A => w.dpc_rate,
                _ => f64::NEG_INFINITY,
            }
        };
        let m = nelder_mead(
            objective,
            &[start.rho.rho1, start.rho.rho2],
            SimplexOptions {
                max_iters: budget.max_iters,
                step: 0.05,
                ..Default::default()
            },
        );
        if m.value > start.dpc_rate {
            best_a = witness_at(k, cfg, CorrelationPoint::projected(m.x[0], m.x[1]));
        }
    }
    let first_c = witnesses
        .iter()
        .find(|w| w.evidence.class == SegmentClass::C)
        .copied();

    let a_rate = best_a.map(|w| w.dpc_rate);
    let c_rate = first_c.map(|_| cfg.awgn_rate(k));
    // a class-A rate never exceeds the interference-free capacity, so any
    // class-C witness characterizes the larger segment
    let (class, rate, witness) = match (first_c, best_a) {
        (Some(w), _) => (SegmentClass::C, c_rate, w),
        (None, Some(w)) => (SegmentClass::A, a_rate, w),
        (None, None) => {
            let w = witness_at(k, cfg, CorrelationPoint::default())
                .or_else(|| witnesses.first().copied());
            let w = w.unwrap_or(Witness {
                rho: CorrelationPoint::default(),
                beta: [0.0; 2],
                evidence: ClassEvidence {
                    class: SegmentClass::B,
                    f_dpc: 0.0,
                    g_dpc: 0.0,
                    f_cancel: 0.0,
                    g_cancel: 0.0,
                },
                dpc_rate: 0.0,
            });
            (SegmentClass::B, None, w)
        }
    };
    UserSegment {
        user: k,
        gamma: segment_gamma(k),
        class,
        rate,
        a_rate,
        c_rate,
        witness,
        witnesses_a: na,
        witnesses_b: nb,
        witnesses_c: nc,
    }
}

pub fn capacity_segments(cfg: &ChannelConfig, budget: &OptimizerBudget) -> SegmentReport {
    let (user1, user2) = rayon::join(
        || user_segment(User::One, cfg, budget),
        || user_segment(User::Two, cfg, budget),
    );
    SegmentReport { user1, user2 }
}
