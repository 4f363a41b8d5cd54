use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Unit in which rates are reported. Internal computations always use bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    #[default]
    Bits,
    Nats,
}

impl RateUnit {
    /// Multiplier converting a rate in bits into this unit.
    pub fn factor(self) -> f64 {
        match self {
            RateUnit::Bits => 1.0,
            RateUnit::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn from_bits(self, bits: f64) -> f64 {
        bits * self.factor()
    }

    pub fn to_bits(self, value: f64) -> f64 {
        value / self.factor()
    }

    pub fn suffix(self) -> &'static str {
        match self {
            RateUnit::Bits => "bits",
            RateUnit::Nats => "nats",
        }
    }
}

impl fmt::Display for RateUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

impl FromStr for RateUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "bits" => Ok(RateUnit::Bits),
            "nats" => Ok(RateUnit::Nats),
            other => Err(Error::InvalidParameter(format!(
                "unknown rate unit '{other}' (expected bits or nats)"
            ))),
        }
    }
}
