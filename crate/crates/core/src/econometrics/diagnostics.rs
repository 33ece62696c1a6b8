//! Residual diagnostics: serial correlation, normality, ARCH effects.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ols::ols;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    BreuschGodfrey,
    JarqueBera,
    ArchLm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticResult {
    pub name: DiagnosticKind,
    pub statistic: f64,
    pub p_value: f64,
    pub lags: Option<usize>,
}

fn chi2_sf(statistic: f64, dof: usize) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    Ok((1.0 - dist.cdf(statistic.max(0.0))).clamp(0.0, 1.0))
}

fn is_constant(col: &[f64]) -> bool {
    col.iter().all(|v| *v == col[0])
}

/// Breusch-Godfrey LM test: regress the residuals on the original
/// regressors and `lags` of their own lags (pre-sample lags set to zero);
/// the statistic is `n R^2`, chi-square with `lags` degrees of freedom.
///
/// A constant is added unless one of `regressors` already is one.
pub fn breusch_godfrey(residuals: &[f64], regressors: &[Vec<f64>], lags: usize) -> Result<DiagnosticResult> {
    let n = residuals.len();
    if lags == 0 {
        return Err(Error::InvalidParameter("lags must be positive".into()));
    }
    if lags >= n || n <= lags + regressors.len() + 2 {
        return Err(Error::SeriesTooShort {
            needed: lags + regressors.len() + 3,
            actual: n,
        });
    }
    let mut cols: Vec<Vec<f64>> = regressors.to_vec();
    if !cols.iter().any(|c| is_constant(c)) {
        cols.push(vec![1.0; n]);
    }
    for lag in 1..=lags {
        cols.push((0..n).map(|t| if t >= lag { residuals[t - lag] } else { 0.0 }).collect());
    }
    let fit = ols(residuals, &cols)?;
    let statistic = n as f64 * fit.r_squared;
    Ok(DiagnosticResult {
        name: DiagnosticKind::BreuschGodfrey,
        statistic,
        p_value: chi2_sf(statistic, lags)?,
        lags: Some(lags),
    })
}

/// Jarque-Bera normality test `(n/6)(S^2 + (K - 3)^2 / 4)`.
pub fn jarque_bera(residuals: &[f64]) -> Result<DiagnosticResult> {
    let n = residuals.len();
    if n < 8 {
        return Err(Error::SeriesTooShort { needed: 8, actual: n });
    }
    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let moment = |k: i32| residuals.iter().map(|e| (e - mean).powi(k)).sum::<f64>() / nf;
    let m2 = moment(2);
    if m2 <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let skew = moment(3) / m2.powf(1.5);
    let kurt = moment(4) / (m2 * m2);
    let statistic = nf / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    Ok(DiagnosticResult {
        name: DiagnosticKind::JarqueBera,
        statistic,
        p_value: chi2_sf(statistic, 2)?,
        lags: None,
    })
}

/// Engle's ARCH LM test: regress squared residuals on a constant and `lags`
/// of their own lags; the statistic is `m R^2` over the `m` usable rows.
pub fn arch_lm(residuals: &[f64], lags: usize) -> Result<DiagnosticResult> {
    if lags == 0 {
        return Err(Error::InvalidParameter("lags must be positive".into()));
    }
    let n = residuals.len();
    if n <= 2 * lags + 2 {
        return Err(Error::SeriesTooShort {
            needed: 2 * lags + 3,
            actual: n,
        });
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let rows = n - lags;
    let target = sq[lags..].to_vec();
    let mut cols = vec![vec![1.0; rows]];
    for lag in 1..=lags {
        cols.push((lags..n).map(|t| sq[t - lag]).collect());
    }
    let fit = ols(&target, &cols)?;
    let statistic = rows as f64 * fit.r_squared;
    Ok(DiagnosticResult {
        name: DiagnosticKind::ArchLm,
        statistic,
        p_value: chi2_sf(statistic, lags)?,
        lags: Some(lags),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_sample_has_zero_skew_unit_kurtosis() {
        for n in [8usize, 100, 1000] {
            let e: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let r = jarque_bera(&e).unwrap();
            assert!((r.statistic - n as f64 / 6.0).abs() < 1e-9 * n as f64);
            assert!((0.0..=1.0).contains(&r.p_value));
        }
        assert!(matches!(jarque_bera(&[1.0; 10]), Err(Error::ConstantSeries)));
        assert!(matches!(jarque_bera(&[1.0; 5]), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn argument_checks() {
        let e: Vec<f64> = (0..20).map(|i| (i as f64 * 1.3).sin()).collect();
        assert!(matches!(arch_lm(&e, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(breusch_godfrey(&e, &[], 20), Err(Error::SeriesTooShort { .. })));
        assert!(breusch_godfrey(&e, &[], 2).unwrap().statistic >= 0.0);
    }
}
