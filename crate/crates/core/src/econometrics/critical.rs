//! Hard-coded critical-value tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "1%")]
    OnePercent,
    #[default]
    #[serde(rename = "5%")]
    FivePercent,
    #[serde(rename = "10%")]
    TenPercent,
}

impl Level {
    pub fn alpha(self) -> f64 {
        match self {
            Level::OnePercent => 0.01,
            Level::FivePercent => 0.05,
            Level::TenPercent => 0.10,
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_end_matches('%') {
            "1" | "0.01" => Ok(Level::OnePercent),
            "5" | "0.05" => Ok(Level::FivePercent),
            "10" | "0.1" | "0.10" => Ok(Level::TenPercent),
            _ => Err(Error::InvalidParameter(format!("unknown significance level `{s}`"))),
        }
    }
}

/// One value per significance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ByLevel<T> {
    #[serde(rename = "1%")]
    pub one: T,
    #[serde(rename = "5%")]
    pub five: T,
    #[serde(rename = "10%")]
    pub ten: T,
}

impl<T: Copy> ByLevel<T> {
    pub fn get(&self, level: Level) -> T {
        match level {
            Level::OnePercent => self.one,
            Level::FivePercent => self.five,
            Level::TenPercent => self.ten,
        }
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> ByLevel<U> {
        ByLevel {
            one: f(self.one),
            five: f(self.five),
            ten: f(self.ten),
        }
    }
}

/// Dickey-Fuller, no deterministic terms. These are also the values applied
/// to Engle-Granger residuals.
pub const DF_NONE: ByLevel<f64> = ByLevel {
    one: -2.58,
    five: -1.95,
    ten: -1.62,
};

/// Dickey-Fuller with a constant (asymptotic).
pub const DF_CONSTANT: ByLevel<f64> = ByLevel {
    one: -3.43,
    five: -2.86,
    ten: -2.57,
};

/// Dickey-Fuller with a constant and linear trend (asymptotic).
pub const DF_TREND: ByLevel<f64> = ByLevel {
    one: -3.96,
    five: -3.41,
    ten: -3.13,
};

/// Johansen trace test for a bivariate system, hypothesis `r <= 1`.
pub const JOHANSEN_R_LE_1: ByLevel<f64> = ByLevel {
    one: 12.97,
    five: 9.24,
    ten: 7.52,
};

/// Johansen trace test for a bivariate system, hypothesis `r = 0`.
pub const JOHANSEN_R_EQ_0: ByLevel<f64> = ByLevel {
    one: 20.20,
    five: 15.67,
    ten: 13.75,
};
