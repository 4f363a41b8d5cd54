//! Channel parameters, helper strategies and the rho/beta reparameterization.
//!
//! Receiver `k` observes `Y_k = eta_k X_0 + X_k + S_k + Z_k` with unit-variance
//! noise `Z_k`, state `S_k ~ N(0, q_k)` known noncausally to the helper, user
//! input power `p_k` and helper power `p0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the helper power budget and on the correlation disk.
pub const CONSTRAINT_SLACK: f64 = 1e-12;

/// One of the two users (equivalently, subchannels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelConfig")]
pub struct ChannelConfig {
    eta1: f64,
    eta2: f64,
    p0: f64,
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
}

#[derive(Deserialize)]
struct RawChannelConfig {
    eta1: f64,
    eta2: f64,
    p0: f64,
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
}

impl TryFrom<RawChannelConfig> for ChannelConfig {
    type Error = Error;

    fn try_from(r: RawChannelConfig) -> Result<Self> {
        validate_config([r.eta1, r.eta2, r.p0, r.p1, r.p2, r.q1, r.q2])
    }
}

/// Validates `(eta1, eta2, p0, p1, p2, q1, q2)`.
///
/// Gains may take any finite real value; powers must be finite and nonnegative.
pub fn validate_config(raw: [f64; 7]) -> Result<ChannelConfig> {
    const NAMES: [&str; 7] = ["eta1", "eta2", "p0", "p1", "p2", "q1", "q2"];
    for (value, name) in raw.iter().zip(NAMES) {
        if !value.is_finite() {
            return Err(Error::NotFinite(name));
        }
    }
    for (value, name) in raw.iter().zip(NAMES).skip(2) {
        if *value < 0.0 {
            return Err(Error::Negative(name));
        }
    }
    let [eta1, eta2, p0, p1, p2, q1, q2] = raw;
    Ok(ChannelConfig {
        eta1,
        eta2,
        p0,
        p1,
        p2,
        q1,
        q2,
    })
}

impl ChannelConfig {
    pub fn new(eta1: f64, eta2: f64, p0: f64, p1: f64, p2: f64, q1: f64, q2: f64) -> Result<Self> {
        validate_config([eta1, eta2, p0, p1, p2, q1, q2])
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.eta1, self.eta2, self.p0, self.p1, self.p2, self.q1, self.q2,
        ]
    }

    pub fn eta(&self, k: User) -> f64 {
        match k {
            User::One => self.eta1,
            User::Two => self.eta2,
        }
    }

    /// Transmit power of user `k`.
    pub fn p(&self, k: User) -> f64 {
        match k {
            User::One => self.p1,
            User::Two => self.p2,
        }
    }

    /// State power on subchannel `k`.
    pub fn q(&self, k: User) -> f64 {
        match k {
            User::One => self.q1,
            User::Two => self.q2,
        }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// The same channel with the helper limited to `p0` (used for power backoff).
    pub fn with_helper_power(&self, p0: f64) -> Result<Self> {
        validate_config([
            self.eta1, self.eta2, p0, self.p1, self.p2, self.q1, self.q2,
        ])
    }

    /// Point-to-point capacity `1/2 log2(1 + p_k)` of an undisturbed subchannel.
    pub fn awgn_rate(&self, k: User) -> f64 {
        half_log2(1.0 + self.p(k))
    }

    /// Rate with helper signal and state both treated as noise.
    pub fn state_as_noise_rate(&self, k: User) -> f64 {
        let eta = self.eta(k);
        half_log2(1.0 + self.p(k) / (eta * eta * self.p0 + self.q(k) + 1.0))
    }

    pub fn is_symmetric(&self) -> bool {
        self.eta1 == self.eta2 && self.p1 == self.p2 && self.q1 == self.q2
    }
}

/// Exchanges the roles of the two subchannels.
pub fn role_swap(cfg: &ChannelConfig) -> ChannelConfig {
    ChannelConfig {
        eta1: cfg.eta2,
        eta2: cfg.eta1,
        p0: cfg.p0,
        p1: cfg.p2,
        p2: cfg.p1,
        q1: cfg.q2,
        q2: cfg.q1,
    }
}

/// Free parameters of the Gaussian inner bound.
///
/// The helper splits its non-cancelling power `p0'` into a share `gamma`
/// dedicated to user 1's dirty-paper auxiliary and `1 - gamma` to user 2's.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HelperStrategy {
    pub alpha11: f64,
    pub alpha12: f64,
    pub alpha20: f64,
    pub alpha21: f64,
    pub alpha22: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
}

impl HelperStrategy {
    pub fn new(alpha1: [f64; 2], alpha2: [f64; 3], beta: [f64; 2], gamma: f64) -> Self {
        HelperStrategy {
            alpha11: alpha1[0],
            alpha12: alpha1[1],
            alpha20: alpha2[0],
            alpha21: alpha2[1],
            alpha22: alpha2[2],
            beta1: beta[0],
            beta2: beta[1],
            gamma,
        }
    }

    pub fn alpha1(&self) -> [f64; 2] {
        [self.alpha11, self.alpha12]
    }

    pub fn alpha2(&self) -> [f64; 3] {
        [self.alpha20, self.alpha21, self.alpha22]
    }

    pub fn beta(&self) -> [f64; 2] {
        [self.beta1, self.beta2]
    }

    pub fn gamma_bar(&self) -> f64 {
        1.0 - self.gamma
    }

    pub fn with_alpha(mut self, alpha: UserAlpha) -> Self {
        match alpha {
            UserAlpha::One(a) => {
                self.alpha11 = a[0];
                self.alpha12 = a[1];
            }
            UserAlpha::Two(a) => {
                self.alpha20 = a[0];
                self.alpha21 = a[1];
                self.alpha22 = a[2];
            }
        }
        self
    }

    pub fn alpha(&self, k: User) -> UserAlpha {
        match k {
            User::One => UserAlpha::One(self.alpha1()),
            User::Two => UserAlpha::Two(self.alpha2()),
        }
    }

    /// Power spent on direct state cancellation, `beta1^2 q1 + beta2^2 q2`.
    pub fn cancellation_power(&self, cfg: &ChannelConfig) -> f64 {
        self.beta1 * self.beta1 * cfg.q1 + self.beta2 * self.beta2 * cfg.q2
    }

    /// Helper power left for dirty-paper coding, `p0 - beta1^2 q1 - beta2^2 q2`.
    pub fn p0_prime(&self, cfg: &ChannelConfig) -> f64 {
        (cfg.p0 - self.cancellation_power(cfg)).max(0.0)
    }

    pub fn validate(&self, cfg: &ChannelConfig) -> Result<()> {
        let all = [
            self.alpha11,
            self.alpha12,
            self.alpha20,
            self.alpha21,
            self.alpha22,
            self.beta1,
            self.beta2,
            self.gamma,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotFinite("strategy coefficient"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::GammaRange(self.gamma));
        }
        let used = self.cancellation_power(cfg);
        if used > cfg.p0 * (1.0 + CONSTRAINT_SLACK) + CONSTRAINT_SLACK {
            return Err(Error::PowerConstraint { used, p0: cfg.p0 });
        }
        Ok(())
    }
}

/// The auxiliary coefficients belonging to one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UserAlpha {
    /// `(alpha11, alpha12)`
    One([f64; 2]),
    /// `(alpha20, alpha21, alpha22)`
    Two([f64; 3]),
}

impl UserAlpha {
    pub fn user(&self) -> User {
        match self {
            UserAlpha::One(_) => User::One,
            UserAlpha::Two(_) => User::Two,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        match self {
            UserAlpha::One(a) => a,
            UserAlpha::Two(a) => a,
        }
    }

    pub fn from_slice(k: User, v: &[f64]) -> Self {
        match k {
            User::One => UserAlpha::One([v[0], v[1]]),
            User::Two => UserAlpha::Two([v[0], v[1], v[2]]),
        }
    }

    pub fn zero(k: User) -> Self {
        match k {
            User::One => UserAlpha::One([0.0; 2]),
            User::Two => UserAlpha::Two([0.0; 3]),
        }
    }

    /// Convex combination `(1 - t) self + t other` of two tuples for the same user.
    pub fn lerp(&self, other: &UserAlpha, t: f64) -> UserAlpha {
        let a = self.as_slice();
        let b = other.as_slice();
        let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
        UserAlpha::from_slice(self.user(), &v)
    }
}

/// Normalized correlations between the helper input and each state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub rho1: f64,
    pub rho2: f64,
}

impl CorrelationPoint {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        let p = CorrelationPoint { rho1, rho2 };
        p.validate()?;
        Ok(p)
    }

    /// Radial projection onto the closed unit disk.
    pub fn projected(rho1: f64, rho2: f64) -> Self {
        let r = rho1.hypot(rho2);
        if r > 1.0 {
            CorrelationPoint {
                rho1: rho1 / r,
                rho2: rho2 / r,
            }
        } else {
            CorrelationPoint { rho1, rho2 }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rho1 * self.rho1 + self.rho2 * self.rho2
    }

    pub fn get(&self, k: User) -> f64 {
        match k {
            User::One => self.rho1,
            User::Two => self.rho2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho1.is_finite() || !self.rho2.is_finite() {
            return Err(Error::NotFinite("rho"));
        }
        if self.norm_sqr() > 1.0 + 1e-9 {
            return Err(Error::OutsideDisk {
                rho1: self.rho1,
                rho2: self.rho2,
            });
        }
        Ok(())
    }
}

/// `beta_j = rho_j sqrt(p0 / q_j)`, with `beta_j = 0` when the state is absent.
pub fn beta_from_rho(cfg: &ChannelConfig, rho: &CorrelationPoint) -> [f64; 2] {
    let b = |r: f64, q: f64| {
        if q > 0.0 {
            r * (cfg.p0 / q).sqrt()
        } else {
            0.0
        }
    };
    [b(rho.rho1, cfg.q1), b(rho.rho2, cfg.q2)]
}

/// Inverse of [`beta_from_rho`]: `rho_j = beta_j sqrt(q_j / p0)`.
///
/// The result is not range-checked; coefficients violating the power budget
/// map outside the unit disk.
pub fn rho_from_beta(cfg: &ChannelConfig, beta1: f64, beta2: f64) -> Result<CorrelationPoint> {
    if !beta1.is_finite() || !beta2.is_finite() {
        return Err(Error::NotFinite("beta"));
    }
    if cfg.p0 <= 0.0 {
        if beta1 != 0.0 || beta2 != 0.0 {
            return Err(Error::NoHelperPower);
        }
        return Ok(CorrelationPoint::default());
    }
    let rho = CorrelationPoint {
        rho1: beta1 * (cfg.q1 / cfg.p0).sqrt(),
        rho2: beta2 * (cfg.q2 / cfg.p0).sqrt(),
    };
    Ok(rho)
}

/// An achievable or bounding rate pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePair { r1, r2 }
    }

    pub fn get(&self, k: User) -> f64 {
        match k {
            User::One => self.r1,
            User::Two => self.r2,
        }
    }

    pub fn swapped(&self) -> Self {
        RatePair {
            r1: self.r2,
            r2: self.r1,
        }
    }

    /// Weighted sum `cos(theta) r1 + sin(theta) r2`.
    pub fn scalarize(&self, theta: f64) -> f64 {
        theta.cos() * self.r1 + theta.sin() * self.r2
    }

    pub fn dominates(&self, other: &RatePair, tol: f64) -> bool {
        self.r1 + tol >= other.r1 && self.r2 + tol >= other.r2
    }
}

pub(crate) fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}
