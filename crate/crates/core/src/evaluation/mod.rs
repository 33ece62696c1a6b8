//! Out-of-sample accuracy of the sentiment forecast against the measured
//! consensus, with the cointegration regression as a baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationResult;
use crate::econometrics::EngleGrangerResult;
use crate::error::{Error, Result};
use crate::timeseries::{align, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mean: f64,
    /// Midpoint of the two central values when `n` is even.
    pub median: f64,
    /// Sample standard deviation (`n - 1` normalisation) over `sqrt(n)`;
    /// zero when `n = 1`.
    pub std_error: f64,
    pub max_abs: f64,
    pub n: usize,
}

/// Signed relative error `(forecast - measured) / measured` on the common
/// dates.
pub fn relative_error_series(forecast: &TimeSeries, measured: &TimeSeries) -> Result<TimeSeries> {
    let (f, m) = align(forecast, measured)?;
    let values = f
        .values()
        .iter()
        .zip(m.values())
        .enumerate()
        .map(|(i, (a, b))| if *b == 0.0 { Err(Error::ZeroDenominator(i)) } else { Ok((a - b) / b) })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(f.dates().to_vec(), values, "relative_error")
}

pub fn error_summary(err: &TimeSeries) -> Result<ErrorSummary> {
    error_summary_values(err.values())
}

pub fn error_summary_values(err: &[f64]) -> Result<ErrorSummary> {
    let n = err.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let nf = n as f64;
    let mean = err.iter().sum::<f64>() / nf;
    let mut sorted = err.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let std_error = if n > 1 {
        let var = err.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Ok(ErrorSummary {
        mean,
        median,
        std_error,
        max_abs: err.iter().fold(0.0, |m, e| m.max(e.abs())),
        n,
    })
}

/// `exp(slope ln X + intercept)` per date.
pub fn baseline_forecast(slope: f64, intercept: f64, index: &TimeSeries) -> Result<TimeSeries> {
    let values = index
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if *x > 0.0 {
                Ok((slope * x.ln() + intercept).exp())
            } else {
                Err(Error::NonPositiveValue { index: i, value: *x })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(index.dates().to_vec(), values, "baseline")
}

/// Forecast of the consensus from a cointegration regression of
/// `ln(consensus)` on `ln(index)`.
pub fn baseline_cointegration_forecast(eg: &EngleGrangerResult, index: &TimeSeries) -> Result<TimeSeries> {
    baseline_forecast(eg.longrun_slope, eg.longrun_intercept, index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub q: f64,
    pub beta: f64,
    pub delta: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub params: ReportParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_errors: Option<ErrorSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_errors: Option<ErrorSummary>,
    /// Plot-data files, relative to the output directory.
    pub files: Vec<String>,
}

/// Writes one CSV per plotted curve (measured, forecast, baseline and their
/// relative errors) into `out_dir` and returns the report document.
pub fn report(
    calib: &CalibrationResult,
    forecast: Option<&TimeSeries>,
    measured: &TimeSeries,
    baseline: Option<&TimeSeries>,
    out_dir: impl AsRef<Path>,
) -> Result<Report> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut save = |name: &str, ts: &TimeSeries| -> Result<()> {
        ts.save_csv(out_dir.join(name))?;
        files.push(name.to_string());
        Ok(())
    };
    save("measured.csv", measured)?;
    let mut summarize = |name: &str, series: Option<&TimeSeries>| -> Result<Option<ErrorSummary>> {
        let Some(series) = series else { return Ok(None) };
        save(&format!("{name}.csv"), series)?;
        let err = relative_error_series(series, measured)?;
        save(&format!("{name}_error.csv"), &err)?;
        error_summary(&err).map(Some)
    };
    let model_errors = summarize("forecast", forecast)?;
    let baseline_errors = summarize("baseline", baseline)?;
    Ok(Report {
        params: ReportParams {
            q: calib.params.q,
            beta: calib.params.beta,
            delta: calib.params.delta,
            k: calib.k,
        },
        model_errors,
        baseline_errors,
        files,
    })
}
