//! Johansen reduced-rank regression for a bivariate system with the constant
//! restricted to the cointegration relation.

use nalgebra::{DMatrix, Matrix2x3, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::critical::{ByLevel, Level, JOHANSEN_R_EQ_0, JOHANSEN_R_LE_1};
use crate::error::{Error, Result};
use crate::timeseries::{align, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    pub lag_order: usize,
    pub n_obs: usize,
    /// Two largest eigenvalues, descending.
    pub eigenvalues: [f64; 2],
    /// Trace statistics for `r = 0` and `r <= 1`.
    pub trace_stats: [f64; 2],
    /// Maximum-eigenvalue statistics for `r = 0` and `r <= 1`. The second
    /// equals the second trace statistic.
    pub max_eigen_stats: [f64; 2],
    /// Critical values for `r = 0` and `r <= 1`; the rank decision compares
    /// them with `max_eigen_stats`.
    pub critical_values: [ByLevel<f64>; 2],
    pub level: Level,
    pub selected_rank: usize,
    /// Cointegrating vector on `(y, z)`, normalised so the `y` entry is 1.
    pub longrun_vector: [f64; 2],
    /// Restricted constant: the relation is `y + v_z z + c`, reported as `-c`.
    pub longrun_intercept: f64,
    /// Adjustment speeds of the `y` and `z` equations.
    pub loadings: [f64; 2],
}

impl JohansenResult {
    /// Long-run slope of `y` on `z`.
    pub fn longrun_slope(&self) -> f64 {
        -self.longrun_vector[1]
    }
}

/// Residuals of the columns of `z` after projecting on the columns of `w`.
fn partial_out(z: &DMatrix<f64>, w: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>> {
    let Some(w) = w else {
        return Ok(z.clone());
    };
    let q = w.clone().qr().q();
    Ok(z - &q * (q.transpose() * z))
}

/// Runs the procedure on `(y, z)` with `lags` lagged differences.
pub fn johansen(y: &TimeSeries, z: &TimeSeries, lags: usize, level: Level) -> Result<JohansenResult> {
    let (y, z) = align(y, z)?;
    johansen_values(y.values(), z.values(), lags, level)
}

pub fn johansen_values(y: &[f64], z: &[f64], lags: usize, level: Level) -> Result<JohansenResult> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch(y.len(), z.len()));
    }
    let n = y.len();
    let needed = 2 * lags + 10 + lags + 1;
    if n < needed {
        return Err(Error::SeriesTooShort { needed, actual: n });
    }
    let levels = [y, z];
    let t_obs = n - 1 - lags;
    let start = lags + 1;

    let z0 = DMatrix::from_fn(t_obs, 2, |r, c| {
        let t = start + r;
        levels[c][t] - levels[c][t - 1]
    });
    let z1 = DMatrix::from_fn(t_obs, 3, |r, c| {
        let t = start + r;
        if c < 2 {
            levels[c][t - 1]
        } else {
            1.0
        }
    });
    let z2 = (lags > 0).then(|| {
        DMatrix::from_fn(t_obs, 2 * lags, |r, c| {
            let t = start + r;
            let (lag, var) = (c / 2 + 1, c % 2);
            levels[var][t - lag] - levels[var][t - lag - 1]
        })
    });

    let r0 = partial_out(&z0, z2.as_ref())?;
    let r1 = partial_out(&z1, z2.as_ref())?;
    let tf = t_obs as f64;
    let s00 = r0.transpose() * &r0 / tf;
    let s01 = r0.transpose() * &r1 / tf;
    let s11 = r1.transpose() * &r1 / tf;

    let s11 = Matrix3::from_iterator(s11.iter().copied());
    let s01 = Matrix2x3::from_iterator(s01.iter().copied());
    let s00 = nalgebra::Matrix2::from_iterator(s00.iter().copied());

    let chol = s11
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("S11 is not positive definite".into()))?;
    let s00_inv = s00
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("S00 is singular".into()))?;
    let l = chol.l();
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("Cholesky factor is singular".into()))?;
    let m = l_inv * s01.transpose() * s00_inv * s01 * l_inv.transpose();
    let m = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda = |i: usize| eig.eigenvalues[order[i]].clamp(0.0, 1.0 - 1e-15);
    let eigenvalues = [lambda(0), lambda(1)];
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }

    let trace_stats = [
        -tf * ((1.0 - eigenvalues[0]).ln() + (1.0 - eigenvalues[1]).ln()),
        -tf * (1.0 - eigenvalues[1]).ln(),
    ];
    let max_eigen_stats = [-tf * (1.0 - eigenvalues[0]).ln(), trace_stats[1]];
    // the stored r = 0 row is the restricted-constant lambda-max row
    let critical_values = [JOHANSEN_R_EQ_0, JOHANSEN_R_LE_1];
    let selected_rank = if max_eigen_stats[0] < critical_values[0].get(level) {
        0
    } else if max_eigen_stats[1] < critical_values[1].get(level) {
        1
    } else {
        2
    };

    let u: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    let mut beta = l_inv.transpose() * u;
    if beta[0].abs() < 1e-300 {
        return Err(Error::NumericalFailure("cointegrating vector has no y component".into()));
    }
    beta /= beta[0];
    let denom = (beta.transpose() * s11 * beta)[(0, 0)];
    let alpha = s01 * beta / denom;

    Ok(JohansenResult {
        lag_order: lags,
        n_obs: t_obs,
        eigenvalues,
        trace_stats,
        max_eigen_stats,
        critical_values,
        level,
        selected_rank,
        longrun_vector: [1.0, beta[1]],
        longrun_intercept: -beta[2],
        loadings: [alpha[0], alpha[1]],
    })
}
