use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::critical::{ByLevel, DF_CONSTANT, DF_NONE, DF_TREND};
use super::ols::ols_matrix;
use crate::error::{Error, Result};

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicSpec {
    #[default]
    None,
    Constant,
    Trend,
}

impl DeterministicSpec {
    fn n_terms(self) -> usize {
        match self {
            DeterministicSpec::None => 0,
            DeterministicSpec::Constant => 1,
            DeterministicSpec::Trend => 2,
        }
    }

    pub fn critical_values(self) -> ByLevel<f64> {
        match self {
            DeterministicSpec::None => DF_NONE,
            DeterministicSpec::Constant => DF_CONSTANT,
            DeterministicSpec::Trend => DF_TREND,
        }
    }
}

impl std::str::FromStr for DeterministicSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "constant" | "const" => Ok(Self::Constant),
            "trend" => Ok(Self::Trend),
            other => Err(Error::InvalidParameter(format!("unknown ADF spec `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagRule {
    /// Use exactly `max_lag` lagged differences.
    Fixed,
    /// Pick the lag in `0..=max_lag` minimising AIC on a common sample.
    #[default]
    Aic,
}

impl std::str::FromStr for LagRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "aic" => Ok(Self::Aic),
            other => Err(Error::InvalidParameter(format!("unknown lag rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lag_order: usize,
    pub spec: DeterministicSpec,
    pub n_obs: usize,
    pub critical_values: ByLevel<f64>,
    pub reject_at: ByLevel<bool>,
}

/// Default upper bound on the lag search, `floor(12 (n/100)^{1/4})`.
pub fn default_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Builds the regression of `Δy_t` on `y_{t-1}`, deterministic terms and
/// `lags` lagged differences, using targets `t = start..n`.
fn design(y: &[f64], spec: DeterministicSpec, lags: usize, start: usize) -> (DVector<f64>, DMatrix<f64>) {
    let n = y.len();
    let rows = n - start;
    let k = 1 + spec.n_terms() + lags;
    let mut x = DMatrix::zeros(rows, k);
    let mut dy = DVector::zeros(rows);
    for (r, t) in (start..n).enumerate() {
        dy[r] = y[t] - y[t - 1];
        x[(r, 0)] = y[t - 1];
        let mut c = 1;
        if spec != DeterministicSpec::None {
            x[(r, c)] = 1.0;
            c += 1;
        }
        if spec == DeterministicSpec::Trend {
            x[(r, c)] = t as f64;
            c += 1;
        }
        for i in 1..=lags {
            x[(r, c)] = y[t - i] - y[t - i - 1];
            c += 1;
        }
    }
    (dy, x)
}

/// Augmented Dickey-Fuller test. The statistic is the t-ratio on `y_{t-1}`.
pub fn adf_test(y: &[f64], spec: DeterministicSpec, max_lag: usize, lag_rule: LagRule) -> Result<AdfResult> {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n.max(1) as f64;
    if n >= 2 && y.iter().all(|v| (v - mean).abs() <= 1e-14 * mean.abs().max(1.0)) {
        return Err(Error::ConstantSeries);
    }
    let min_len = |lags: usize| lags + 2 + 1 + spec.n_terms() + lags;
    if n < min_len(max_lag) {
        return Err(Error::SeriesTooShort {
            needed: min_len(max_lag),
            actual: n,
        });
    }

    let lag_order = match lag_rule {
        LagRule::Fixed => max_lag,
        LagRule::Aic => {
            let start = max_lag + 1;
            let mut best = (f64::INFINITY, 0);
            for lags in 0..=max_lag {
                let (dy, x) = design(y, spec, lags, start);
                let fit = match ols_matrix(&dy, &x) {
                    Ok(f) => f,
                    Err(Error::RankDeficient) => continue,
                    Err(e) => return Err(e),
                };
                let m = fit.n_obs as f64;
                let aic = m * (fit.rss / m).ln() + 2.0 * fit.n_params as f64;
                if aic < best.0 {
                    best = (aic, lags);
                }
            }
            best.1
        }
    };

    let (dy, x) = design(y, spec, lag_order, lag_order + 1);
    let fit = ols_matrix(&dy, &x).map_err(|e| match e {
        Error::RankDeficient if dy.iter().all(|v| *v == 0.0) => Error::ConstantSeries,
        other => other,
    })?;
    let statistic = fit.t_stats[0];
    let critical_values = spec.critical_values();
    Ok(AdfResult {
        statistic,
        lag_order,
        spec,
        n_obs: fit.n_obs,
        critical_values,
        reject_at: critical_values.map(|cv| statistic < cv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let r = adf_test(&[1.0, 2.0, 3.0, 4.0, 5.0], DeterministicSpec::None, 0, LagRule::Fixed).unwrap();
        // slope 10/30, se sqrt((2/9)/30)
        let expected = (1.0 / 3.0) / ((2.0 / 9.0) / 30.0f64).sqrt();
        assert!((r.statistic - expected).abs() < 1e-12);
        assert!((r.statistic - 3.873).abs() < 1e-3);
        assert!(!r.reject_at.one && !r.reject_at.five && !r.reject_at.ten);
        assert_eq!(r.critical_values, DF_NONE);
    }

    #[test]
    fn constant_series() {
        assert!(matches!(
            adf_test(&[4.0; 20], DeterministicSpec::None, 0, LagRule::Fixed),
            Err(Error::ConstantSeries)
        ));
        assert!(matches!(
            adf_test(&[1.0, 2.0], DeterministicSpec::None, 0, LagRule::Fixed),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn stationary_series_rejects() {
        let y: Vec<f64> = (0..300).map(|t| ((t * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let r = adf_test(&y, DeterministicSpec::Constant, 4, LagRule::Aic).unwrap();
        assert!(r.reject_at.one, "{}", r.statistic);
    }

    proptest! {
        #[test]
        fn scale_invariance(scale in 0.01f64..1000.0, seed in 0u64..1000) {
            let mut y = vec![0.0];
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for _ in 0..80 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let e = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                let last = *y.last().unwrap();
                y.push(0.9 * last + e);
            }
            let a = adf_test(&y, DeterministicSpec::None, 2, LagRule::Fixed).unwrap();
            let scaled: Vec<f64> = y.iter().map(|v| v * scale).collect();
            let b = adf_test(&scaled, DeterministicSpec::None, 2, LagRule::Fixed).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9 * a.statistic.abs().max(1.0));
        }
    }
}
