use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least squares fit with classical (homoskedastic) standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub rss: f64,
    pub n_obs: usize,
    pub n_params: usize,
    /// Row-major coefficient covariance, `s^2 (X'X)^{-1}`.
    #[serde(skip)]
    pub covariance: Vec<f64>,
}

impl OlsFit {
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.n_obs - self.n_params) as f64
    }

    pub fn covariance_at(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.n_params + j]
    }

    pub fn fitted(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.residuals).map(|(y, e)| y - e).collect()
    }
}

/// Regresses `y` on the given regressor columns. Include a column of ones
/// for an intercept.
pub fn ols(y: &[f64], regressors: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    let k = regressors.len();
    if let Some(col) = regressors.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch(col.len(), n));
    }
    let x = DMatrix::from_fn(n, k, |i, j| regressors[j][i]);
    ols_matrix(&DVector::from_column_slice(y), &x)
}

pub(crate) fn ols_matrix(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if k == 0 || n <= k {
        return Err(Error::TooFewObservations {
            n_obs: n,
            n_params: k,
        });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let col_scale = (0..k).map(|j| x.column(j).norm()).fold(0.0f64, f64::max);
    for j in 0..k {
        if x.column(j).norm() == 0.0 || r[(j, j)].abs() <= 1e-10 * col_scale {
            return Err(Error::RankDeficient);
        }
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient)?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let residuals = y - x * &beta;
    let rss = residuals.norm_squared();
    let sigma2 = rss / (n - k) as f64;
    let covariance = (&xtx_inv * sigma2).transpose().as_slice().to_vec();
    let std_errors: Vec<f64> = (0..k).map(|j| (sigma2 * xtx_inv[(j, j)]).sqrt()).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let t_stats = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| b / se)
        .collect();

    let has_intercept = (0..k).any(|j| {
        let c = x.column(j);
        c[0] != 0.0 && c.iter().all(|v| *v == c[0])
    });
    let tss = if has_intercept {
        let mean = y.mean();
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };

    Ok(OlsFit {
        coefficients,
        std_errors,
        t_stats,
        residuals: residuals.iter().copied().collect(),
        r_squared,
        rss,
        n_obs: n,
        n_params: k,
        covariance,
    })
}
