//! Least-squares fit of the sentiment equation to observed consensus data.
//!
//! The sentiment depends on `q` and `beta` only through `k = q beta`, so the
//! search runs over `(k, delta)`; `(q, beta)` is reported by fixing `q`.

mod search;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{sentiment_closed_form, ForcingPath, KineticParams, SentimentPath};
use crate::timeseries::{align, TimeSeries};

pub use search::{calibrate, global_search, CalibrationConfig};
pub use simplex::local_refine;

/// Attractiveness used to split `k` into `(q, beta)` unless overridden.
pub const DEFAULT_Q_FIXED: f64 = 0.28;

pub const RIDGE_NOTE: &str = "the sentiment depends on q and beta only through k = q*beta; \
k and delta are fitted, and (q, beta) = (q_fixed, k/q_fixed) is a convention";

/// Search box for `(k, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub k: (f64, f64),
    pub delta: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            k: (0.01, 20.0),
            delta: (-0.5, 1.0),
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        let (k0, k1) = self.k;
        let (d0, d1) = self.delta;
        if !(k0 > 0.0 && k1 > k0 && k1.is_finite()) {
            return Err(Error::InvalidParameter(format!("k bounds ({k0}, {k1})")));
        }
        if !(d0 > -1.0 && d1 > d0 && d1.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta bounds ({d0}, {d1})")));
        }
        Ok(())
    }

    /// Maps `(k, delta)` to the unit square, `k` on a log scale.
    pub(crate) fn to_unit(&self, p: Point) -> [f64; 2] {
        let (k0, k1) = self.k;
        let (d0, d1) = self.delta;
        [
            (p.k.ln() - k0.ln()) / (k1.ln() - k0.ln()),
            (p.delta - d0) / (d1 - d0),
        ]
    }

    /// Inverse of [`Bounds::to_unit`], projecting onto the box first.
    pub(crate) fn from_unit(&self, u: [f64; 2]) -> Point {
        let (k0, k1) = self.k;
        let (d0, d1) = self.delta;
        let (a, b) = (u[0].clamp(0.0, 1.0), u[1].clamp(0.0, 1.0));
        let k = match a {
            0.0 => k0,
            1.0 => k1,
            _ => (k0.ln() + a * (k1.ln() - k0.ln())).exp().clamp(k0, k1),
        };
        Point {
            k,
            delta: (d0 + b * (d1 - d0)).clamp(d0, d1),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.k.0..=self.k.1).contains(&p.k) && (self.delta.0..=self.delta.1).contains(&p.delta)
    }
}

/// A point in the identified parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub k: f64,
    pub delta: f64,
}

impl Point {
    pub fn params(&self, q_fixed: f64) -> Result<KineticParams> {
        KineticParams::new(q_fixed, self.k / q_fixed, self.delta, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub point: Point,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    index: TimeSeries,
    measured: TimeSeries,
    forcing: ForcingPath,
    s0: f64,
    dt: f64,
    pub bounds: Bounds,
}

impl CalibrationProblem {
    /// Aligns the series on their common dates. Observation `i` of the
    /// aligned series sits at model time `i * dt`.
    pub fn new(index: &TimeSeries, measured: &TimeSeries, s0: f64, dt: f64) -> Result<Self> {
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(Error::InvalidParameter(format!("s0 must be positive, got {s0}")));
        }
        let (index, measured) = align(index, measured)?;
        if index.len() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                actual: index.len(),
            });
        }
        let forcing = ForcingPath::from_series(&index, dt)?;
        Ok(Self {
            index,
            measured,
            forcing,
            s0,
            dt,
            bounds: Bounds::default(),
        })
    }

    /// Starts the model at the first measured value.
    pub fn from_series(index: &TimeSeries, measured: &TimeSeries, dt: f64) -> Result<Self> {
        let (_, m) = align(index, measured)?;
        Self::new(index, measured, m.values()[0], dt)
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Result<Self> {
        bounds.validate()?;
        self.bounds = bounds;
        Ok(self)
    }

    pub fn index(&self) -> &TimeSeries {
        &self.index
    }

    pub fn measured(&self) -> &TimeSeries {
        &self.measured
    }

    pub fn forcing(&self) -> &ForcingPath {
        &self.forcing
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The model sentiment on the observation dates.
    pub fn model_path(&self, params: &KineticParams) -> Result<SentimentPath> {
        sentiment_closed_form(params, &self.forcing, self.s0, &self.forcing.knot_times())
    }

    pub fn model_series(&self, params: &KineticParams) -> Result<TimeSeries> {
        let path = self.model_path(params)?;
        TimeSeries::new(self.index.dates().to_vec(), path.s_values, "sentiment")
    }

    pub(crate) fn objective_at(&self, p: Point) -> Result<f64> {
        objective(&p.params(DEFAULT_Q_FIXED)?, self)
    }
}

/// Euclidean distance between the model sentiment and the measurements over
/// the observation dates.
pub fn objective(params: &KineticParams, problem: &CalibrationProblem) -> Result<f64> {
    let path = problem.model_path(params)?;
    Ok(euclidean(&path.s_values, problem.measured.values()))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: KineticParams,
    /// `q * beta`, the rate the data identifies.
    pub k: f64,
    pub objective: f64,
    pub n_evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub ridge_note: String,
}

impl CalibrationResult {
    pub(crate) fn from_point(point: Point, objective: f64, q_fixed: f64, n_evaluations: usize, converged: bool) -> Result<Self> {
        let params = point.params(q_fixed)?;
        Ok(Self {
            params,
            k: point.k,
            objective,
            n_evaluations,
            converged,
            restarts_used: 0,
            ridge_note: RIDGE_NOTE.to_string(),
        })
    }

    pub fn point(&self) -> Point {
        Point {
            k: self.k,
            delta: self.params.delta,
        }
    }
}
