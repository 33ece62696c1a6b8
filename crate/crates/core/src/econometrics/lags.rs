use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ols::ols_matrix;
use crate::error::{Error, Result};
use crate::timeseries::{align, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub lags: usize,
    pub aic: f64,
    pub sic: f64,
    pub hq: f64,
    pub fpe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub aic: usize,
    pub sic: usize,
    pub hq: usize,
    pub fpe: usize,
    pub table: Vec<CriteriaRow>,
}

pub fn var_lag_select(y: &TimeSeries, z: &TimeSeries, p_max: usize) -> Result<LagSelection> {
    let (y, z) = align(y, z)?;
    var_lag_select_values(y.values(), z.values(), p_max)
}

/// Fits VAR(p) with intercept to the first differences of `(y, z)` for
/// `p = 1..=p_max` on a common sample and reports the minimiser of each
/// information criterion. Ties go to the smaller `p`.
pub fn var_lag_select_values(y: &[f64], z: &[f64], p_max: usize) -> Result<LagSelection> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch(y.len(), z.len()));
    }
    if p_max == 0 {
        return Err(Error::InvalidParameter("p_max must be at least 1".into()));
    }
    let n = y.len();
    let needed = 2 * p_max + 10 + 1;
    if n < needed {
        return Err(Error::SeriesTooShort { needed, actual: n });
    }
    let d: [Vec<f64>; 2] = [
        y.windows(2).map(|w| w[1] - w[0]).collect(),
        z.windows(2).map(|w| w[1] - w[0]).collect(),
    ];
    let nd = d[0].len();
    let rows = nd - p_max;
    if rows <= 2 * p_max + 1 {
        return Err(Error::SeriesTooShort { needed, actual: n });
    }
    let tf = rows as f64;

    let mut table = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let x = DMatrix::from_fn(rows, 1 + 2 * p, |r, c| {
            let t = p_max + r;
            if c == 0 {
                1.0
            } else {
                let (lag, var) = ((c - 1) / 2 + 1, (c - 1) % 2);
                d[var][t - lag]
            }
        });
        let mut resid = Vec::with_capacity(2);
        for series in &d {
            let target = DVector::from_fn(rows, |r, _| series[p_max + r]);
            resid.push(ols_matrix(&target, &x)?.residuals);
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>() / tf;
        let s00 = dot(&resid[0], &resid[0]);
        let s11 = dot(&resid[1], &resid[1]);
        let s01 = dot(&resid[0], &resid[1]);
        let det = s00 * s11 - s01 * s01;
        if !(det > 0.0) {
            return Err(Error::NumericalFailure("singular residual covariance".into()));
        }
        let m = (1 + 2 * p) as f64;
        let k_total = 2.0 * m;
        let ln_det = det.ln();
        table.push(CriteriaRow {
            lags: p,
            aic: ln_det + 2.0 * k_total / tf,
            sic: ln_det + k_total * tf.ln() / tf,
            hq: ln_det + 2.0 * k_total * tf.ln().ln() / tf,
            fpe: ((tf + m) / (tf - m)).powi(2) * det,
        });
    }
    let argmin = |f: fn(&CriteriaRow) -> f64| {
        table
            .iter()
            .fold((f64::INFINITY, 0), |best, row| {
                if f(row) < best.0 {
                    (f(row), row.lags)
                } else {
                    best
                }
            })
            .1
    };
    Ok(LagSelection {
        aic: argmin(|r| r.aic),
        sic: argmin(|r| r.sic),
        hq: argmin(|r| r.hq),
        fpe: argmin(|r| r.fpe),
        table,
    })
}
