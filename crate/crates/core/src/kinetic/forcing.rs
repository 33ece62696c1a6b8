use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Hold the last observation until the next one.
    PiecewiseConstant,
}

/// Index level `X(t)` observed on a uniform grid `t_i = i * dt` (years),
/// interpolated in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingPath {
    dt: f64,
    values: Vec<f64>,
    interpolation: Interpolation,
}

/// Slack allowed when checking that a requested time lies on the path.
const TIME_SLACK: f64 = 1e-9;

impl ForcingPath {
    pub fn new(values: Vec<f64>, dt: f64, interpolation: Interpolation) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeStep(format!("observation spacing {dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            dt,
            values,
            interpolation,
        })
    }

    pub fn from_series(ts: &TimeSeries, dt: f64) -> Result<Self> {
        Self::new(ts.values().to_vec(), dt, Interpolation::Linear)
    }

    /// Constant level `x` on `[0, t_end]`.
    pub fn constant(x: f64, t_end: f64) -> Result<Self> {
        Self::new(vec![x, x], t_end.max(f64::MIN_POSITIVE), Interpolation::Linear)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn t_end(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Observation times `i * dt`.
    pub fn knot_times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn check_covers(&self, t: f64) -> Result<()> {
        if t < -TIME_SLACK || t > self.t_end() + TIME_SLACK * self.dt.max(1.0) {
            return Err(Error::PathTooShort {
                requested: t,
                available: self.t_end(),
            });
        }
        Ok(())
    }

    /// Index of the knot interval holding `t`, clamped to the path.
    fn interval(&self, t: f64) -> (usize, f64) {
        let last = self.values.len() - 1;
        if last == 0 || t <= 0.0 {
            return (0, 0.0);
        }
        let pos = t / self.dt;
        let i = pos.floor() as usize;
        if i >= last {
            return (last - 1, 1.0);
        }
        (i, pos - i as f64)
    }

    /// `X(t)`; times outside the path are clamped to its ends.
    pub fn value_at(&self, t: f64) -> f64 {
        let (i, frac) = self.interval(t);
        if self.values.len() == 1 {
            return self.values[0];
        }
        match self.interpolation {
            Interpolation::Linear => self.values[i] + frac * (self.values[i + 1] - self.values[i]),
            Interpolation::PiecewiseConstant => {
                if frac >= 1.0 {
                    self.values[i + 1]
                } else {
                    self.values[i]
                }
            }
        }
    }

    /// First knot time strictly after `t`, or `None` past the last knot.
    pub(crate) fn next_knot_after(&self, t: f64) -> Option<f64> {
        let pos = t / self.dt;
        let mut i = pos.floor() as usize + 1;
        // a time sitting on a knot up to rounding counts as that knot
        if (i as f64 - pos) * self.dt <= TIME_SLACK * self.dt {
            i += 1;
        }
        (i < self.values.len()).then(|| i as f64 * self.dt)
    }
}
