//! Cointegration econometrics and a kinetic mean-field model of analysts'
//! consensus target prices.
//!
//! The econometric side tests whether the consensus follows the index
//! (unit roots, Engle-Granger, Johansen, VECM, residual diagnostics). The
//! kinetic side models the distribution of one-year forecasts, solves its
//! moment equations, simulates it with particles and a Neumann-series grid
//! solver, and calibrates it against observed consensus data.

pub mod calibration;
pub mod distribution;
pub mod econometrics;
pub mod error;
pub mod evaluation;
pub mod kinetic;
pub mod timeseries;

pub use error::{Error, Result};
