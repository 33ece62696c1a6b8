use serde::{Deserialize, Serialize};

use super::adf::{adf_test, default_max_lag, AdfResult, DeterministicSpec, LagRule};
use super::critical::Level;
use super::ols::{ols, OlsFit};
use crate::error::{Error, Result};
use crate::timeseries::{align, TimeSeries};

/// Minimum aligned length for the two-step procedure.
pub const MIN_EG_LENGTH: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngleGrangerResult {
    pub longrun_slope: f64,
    pub longrun_intercept: f64,
    pub regression: OlsFit,
    /// `y - slope z - intercept` on the aligned dates.
    pub residual_series: TimeSeries,
    pub residual_adf: AdfResult,
    pub level: Level,
    pub cointegrated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngleGrangerOptions {
    pub level: Level,
    pub lag_rule: LagRule,
    /// `None` means [`default_max_lag`] of the sample size.
    pub max_lag: Option<usize>,
}

impl Default for EngleGrangerOptions {
    fn default() -> Self {
        Self {
            level: Level::FivePercent,
            lag_rule: LagRule::Aic,
            max_lag: None,
        }
    }
}

/// Two-step cointegration test: OLS of `y` on `z` with an intercept, then a
/// no-constant ADF test on the residuals.
pub fn engle_granger(y: &TimeSeries, z: &TimeSeries, options: EngleGrangerOptions) -> Result<EngleGrangerResult> {
    let (y, z) = align(y, z)?;
    let n = y.len();
    if n < MIN_EG_LENGTH {
        return Err(Error::SeriesTooShort {
            needed: MIN_EG_LENGTH,
            actual: n,
        });
    }
    let fit = ols(y.values(), &[z.values().to_vec(), vec![1.0; n]])?;
    let (slope, intercept) = (fit.coefficients[0], fit.coefficients[1]);
    let scale = y.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if fit.residuals.iter().all(|e| e.abs() <= 1e-12 * scale) {
        return Err(Error::DegenerateResiduals);
    }
    let residual_series = TimeSeries::new(y.dates().to_vec(), fit.residuals.clone(), "eg_residual")?;
    let max_lag = options
        .max_lag
        .unwrap_or_else(|| default_max_lag(n))
        .min((n - 4) / 2);
    let residual_adf = adf_test(fit.residuals.as_slice(), DeterministicSpec::None, max_lag, options.lag_rule)?;
    let cointegrated = residual_adf.reject_at.get(options.level);
    Ok(EngleGrangerResult {
        longrun_slope: slope,
        longrun_intercept: intercept,
        regression: fit,
        residual_series,
        residual_adf,
        level: options.level,
        cointegrated,
    })
}
