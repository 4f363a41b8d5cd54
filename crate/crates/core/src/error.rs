use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} negative")]
    Negative(&'static str),

    #[error("{0} not finite")]
    NotFinite(&'static str),

    #[error("gamma {0} outside [0, 1]")]
    GammaRange(f64),

    #[error("helper power constraint violated: beta1^2 q1 + beta2^2 q2 = {used} > p0 = {p0}")]
    PowerConstraint { used: f64, p0: f64 },

    #[error("correlation point ({rho1}, {rho2}) outside the unit disk")]
    OutsideDisk { rho1: f64, rho2: f64 },

    #[error("helper has no power")]
    NoHelperPower,

    #[error("variable sets overlap")]
    OverlappingSets,

    #[error("variable set must be non-empty")]
    EmptySet,

    #[error("internal consistency: mutual information evaluated to {0}")]
    NegativeInformation(f64),

    #[error("sample count {0} is below 2")]
    TooFewSamples(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
