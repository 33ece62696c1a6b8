use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::DEFAULT_DT;

/// Constants of the kinetic opinion model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticParams {
    /// Attractiveness of the premium-adjusted index, in (0, 1).
    pub q: f64,
    /// Interaction rate, per year.
    pub beta: f64,
    /// Relative premium over the index.
    pub delta: f64,
    /// Strength of the pull toward the population mean, per year.
    pub alpha: f64,
}

impl KineticParams {
    pub fn new(q: f64, beta: f64, delta: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            q,
            beta,
            delta,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    /// Calibrated values reported for the S&P 500 consensus, with `alpha = 0`.
    pub fn reference() -> Self {
        Self {
            q: 0.28,
            beta: 6.05,
            delta: 0.143,
            alpha: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad(format!("q must lie in (0, 1), got {}", self.q));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be nonnegative, got {}", self.alpha));
        }
        if !(self.delta > -1.0 && self.delta.is_finite()) {
            return bad(format!("delta must exceed -1, got {}", self.delta));
        }
        Ok(())
    }

    /// Relaxation rate of the mean, `q * beta`. The only combination of
    /// `q` and `beta` the sentiment depends on.
    pub fn k(&self) -> f64 {
        self.q * self.beta
    }

    /// Premium-adjusted target `X (1 + delta)`.
    pub fn target(&self, index_level: f64) -> f64 {
        index_level * (1.0 + self.delta)
    }
}

/// On-disk parameter set: the model constants plus the model time per
/// observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsDocument {
    pub q: f64,
    pub beta: f64,
    pub delta: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_dt")]
    pub dt_per_observation: f64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

impl ParamsDocument {
    pub fn new(params: KineticParams, dt_per_observation: f64) -> Self {
        Self {
            q: params.q,
            beta: params.beta,
            delta: params.delta,
            alpha: params.alpha,
            dt_per_observation,
        }
    }

    pub fn params(&self) -> Result<KineticParams> {
        KineticParams::new(self.q, self.beta, self.delta, self.alpha)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: Self = serde_json::from_str(&text)?;
        doc.params()?;
        if !(doc.dt_per_observation > 0.0) {
            return Err(Error::InvalidParameter("dt_per_observation must be positive".into()));
        }
        Ok(doc)
    }
}
