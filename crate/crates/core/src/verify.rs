//! Randomized cross-checks of the closed forms against the covariance oracle
//! and of the structural identities linking inner and outer bounds.
//!
//! The formulas under test are injected through [`Formulas`] so that a
//! deliberately wrong implementation can be shown to fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::{alpha_star_cancel, alpha_star_dpc, rate_f, rate_g, reduced_f};
use crate::error::Result;
use crate::gaussian::{
    build_joint_covariance, gaussian_cmi, gaussian_mi, joint_bounds, sequential_terms, Var,
    VariableSet,
};
use crate::model::{
    beta_from_rho, half_log2, rho_from_beta, ChannelConfig, CorrelationPoint, HelperStrategy,
    User, UserAlpha,
};
use crate::outer::outer_first_term;

pub const ORACLE_TOL: f64 = 1e-9;
pub const CANCELLATION_TOL: f64 = 1e-12;

type RateFn = fn(User, &ChannelConfig, &HelperStrategy) -> Result<f64>;
type ReducedFn = fn(User, &ChannelConfig, [f64; 2], f64) -> Result<f64>;

/// Implementations under test.
#[derive(Clone, Copy)]
pub struct Formulas {
    pub rate_f: RateFn,
    pub rate_g: RateFn,
    pub reduced_f: ReducedFn,
}

impl Default for Formulas {
    fn default() -> Self {
        Formulas {
            rate_f,
            rate_g,
            reduced_f,
        }
    }
}

/// Draws a channel with gains bounded away from zero, so that every closed form
/// is exact rather than a conservative limit.
pub fn random_config<R: Rng>(rng: &mut R) -> ChannelConfig {
    let gain = |rng: &mut R| {
        let m: f64 = rng.random_range(0.2..2.0);
        if rng.random_bool(0.5) {
            m
        } else {
            -m
        }
    };
    let eta1 = gain(rng);
    let eta2 = gain(rng);
    let log_uniform = |rng: &mut R, lo: f64, hi: f64| -> f64 {
        let (a, b) = (lo.ln(), hi.ln());
        rng.random_range(a..b).exp()
    };
    let p0 = log_uniform(rng, 0.1, 100.0);
    let p1 = log_uniform(rng, 0.1, 20.0);
    let p2 = log_uniform(rng, 0.1, 20.0);
    let q1 = log_uniform(rng, 0.1, 100.0);
    let q2 = log_uniform(rng, 0.1, 100.0);
    // all drawn values are finite and nonnegative
    ChannelConfig::new(eta1, eta2, p0, p1, p2, q1, q2).unwrap_or_else(|_| unreachable!())
}

/// Uniform point of the unit disk.
pub fn random_rho<R: Rng>(rng: &mut R) -> CorrelationPoint {
    let r = rng.random_range(0.0f64..1.0).sqrt();
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    CorrelationPoint::projected(r * phi.cos(), r * phi.sin())
}

pub fn random_strategy<R: Rng>(rng: &mut R, cfg: &ChannelConfig) -> HelperStrategy {
    let beta = beta_from_rho(cfg, &random_rho(rng));
    let mut a = || rng.random_range(-2.0..2.0);
    HelperStrategy::new(
        [a(), a()],
        [a(), a(), a()],
        beta,
        rng.random_range(0.0..=1.0),
    )
}

/// Worst deviation observed by one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub cases: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

#[derive(Default)]
struct Worst {
    names: Vec<(&'static str, f64)>,
    values: Vec<f64>,
}

impl Worst {
    fn record(&mut self, name: &'static str, tol: f64, deviation: f64) {
        let d = if deviation.is_nan() { f64::INFINITY } else { deviation };
        match self.names.iter().position(|(n, _)| *n == name) {
            Some(i) => self.values[i] = self.values[i].max(d),
            None => {
                self.names.push((name, tol));
                self.values.push(d);
            }
        }
    }

    fn into_checks(self) -> Vec<CheckResult> {
        self.names
            .into_iter()
            .zip(self.values)
            .map(|((name, tol), worst)| CheckResult {
                name: name.to_string(),
                worst,
                tol,
                pass: worst <= tol,
            })
            .collect()
    }
}

fn oracle_f(k: User, cfg: &ChannelConfig, s: &HelperStrategy) -> Result<(f64, f64)> {
    use Var::*;
    let cov = build_joint_covariance(cfg, s)?;
    let set = VariableSet::of;
    let (aux, x, y, cond) = match k {
        User::One => (U, X1, Y1, set(&[S1, S2])),
        User::Two => (V, X2, Y2, set(&[U, S1, S2])),
    };
    let f = gaussian_mi(&cov, set(&[aux, x]), set(&[y]))? - gaussian_mi(&cov, set(&[aux]), cond)?;
    let g = gaussian_cmi(&cov, set(&[x]), set(&[y]), set(&[aux]))?;
    Ok((f, g))
}

fn check_case(
    cfg: &ChannelConfig,
    s: &HelperStrategy,
    formulas: &Formulas,
    worst: &mut Worst,
) -> Result<()> {
    for k in User::BOTH {
        let (f, g) = oracle_f(k, cfg, s)?;
        let (fname, gname) = match k {
            User::One => ("f1 vs oracle", "g1 vs oracle"),
            User::Two => ("f2 vs oracle", "g2 vs oracle"),
        };
        worst.record(fname, ORACLE_TOL, ((formulas.rate_f)(k, cfg, s)? - f).abs());
        worst.record(gname, ORACLE_TOL, ((formulas.rate_g)(k, cfg, s)? - g).abs());
    }

    let beta = s.beta();
    for k in User::BOTH {
        let dpc = HelperStrategy::new([0.0; 2], [0.0; 3], beta, s.gamma)
            .with_alpha(alpha_star_dpc(k, cfg, beta, s.gamma));
        let dev = ((formulas.reduced_f)(k, cfg, beta, s.gamma)? - (formulas.rate_f)(k, cfg, &dpc)?).abs();
        worst.record("reduced form", ORACLE_TOL, dev);
    }

    let rho = rho_from_beta(cfg, beta[0], beta[1])?;
    for (k, gamma) in [(User::One, 1.0), (User::Two, 0.0)] {
        let dev = ((formulas.reduced_f)(k, cfg, beta, gamma)? - outer_first_term(k, cfg, &rho)?).abs();
        worst.record("tightness", ORACLE_TOL, dev);
    }

    let p0p = s.p0_prime(cfg);
    let cancel = |k: User, gamma: f64| {
        HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma).with_alpha(alpha_star_cancel(k, cfg, beta))
    };
    let e1 = cfg.eta(User::One);
    let expected1 = half_log2(1.0 + cfg.p(User::One) / (1.0 + e1 * e1 * s.gamma_bar() * p0p));
    let g1 = (formulas.rate_g)(User::One, cfg, &cancel(User::One, s.gamma))?;
    worst.record("cancellation", CANCELLATION_TOL, (g1 - expected1).abs());
    let g1_full = (formulas.rate_g)(User::One, cfg, &cancel(User::One, 1.0))?;
    worst.record("cancellation", CANCELLATION_TOL, (g1_full - cfg.awgn_rate(User::One)).abs());
    let g2 = (formulas.rate_g)(User::Two, cfg, &cancel(User::Two, s.gamma))?;
    worst.record("cancellation", CANCELLATION_TOL, (g2 - cfg.awgn_rate(User::Two)).abs());

    let terms = sequential_terms(cfg, s)?;
    let joint = joint_bounds(cfg, s)?;
    let u = terms.unclamped();
    worst.record("sequential within joint", ORACLE_TOL, (u.r1 + u.r2 - joint.bsum).max(0.0));

    let cov = build_joint_covariance(cfg, s)?;
    let set = VariableSet::of;
    use Var::*;
    let lhs = gaussian_mi(&cov, set(&[V]), set(&[U, S1, S2]))?;
    let rhs = gaussian_mi(&cov, set(&[V]), set(&[S1, S2]))?
        + gaussian_cmi(&cov, set(&[V]), set(&[U]), set(&[S1, S2]))?;
    worst.record("chain rule", ORACLE_TOL, (lhs - rhs).abs());
    Ok(())
}

fn finish(cases: usize, seed: u64, worst: Worst) -> VerifyReport {
    let checks = worst.into_checks();
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport {
        cases,
        seed,
        checks,
        pass,
    }
}

/// Runs every check on `n` random channels, each with one random strategy.
pub fn verify_random(n: usize, seed: u64, formulas: &Formulas) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::default();
    for _ in 0..n {
        let cfg = random_config(&mut rng);
        let s = random_strategy(&mut rng, &cfg);
        check_case(&cfg, &s, formulas, &mut worst)?;
    }
    Ok(finish(n, seed, worst))
}

/// Runs every check on `n` random strategies for a fixed channel.
///
/// Checks that need a helper with power and states with power are skipped
/// when the channel lacks them.
pub fn verify_config(
    cfg: &ChannelConfig,
    n: usize,
    seed: u64,
    formulas: &Formulas,
) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::default();
    for _ in 0..n {
        let s = random_strategy(&mut rng, cfg);
        if cfg.p0() > 0.0 {
            check_case(cfg, &s, formulas, &mut worst)?;
        } else {
            // without helper power the rate terms reduce to the state-as-noise limit
            for k in User::BOTH {
                let zero = s.with_alpha(UserAlpha::zero(k));
                let (f, g) = oracle_f(k, cfg, &zero)?;
                worst.record("f vs oracle", ORACLE_TOL, ((formulas.rate_f)(k, cfg, &zero)? - f).abs());
                worst.record("g vs oracle", ORACLE_TOL, ((formulas.rate_g)(k, cfg, &zero)? - g).abs());
            }
        }
    }
    Ok(finish(n, seed, worst))
}
