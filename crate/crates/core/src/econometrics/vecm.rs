//! Vector error-correction model for the pair `(y, z)`, where `y` is the
//! response of the long-run relation `y = slope z + intercept`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::critical::Level;
use super::johansen::{johansen_values, JohansenResult};
use super::ols::{ols_matrix, OlsFit};
use crate::error::{Error, Result};
use crate::timeseries::{align, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Y,
    Z,
}

impl Variable {
    fn index(self) -> usize {
        match self {
            Variable::Y => 0,
            Variable::Z => 1,
        }
    }
}

/// Which lagged-difference coefficients of an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagBlock {
    /// Lags of the response's own differences.
    Own,
    /// Lags of the other variable's differences.
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmEquation {
    pub response: Variable,
    /// Error-correction loading; present for rank 1.
    pub loading: Option<f64>,
    pub loading_std_error: Option<f64>,
    pub loading_t_stat: Option<f64>,
    /// Coefficients on `y_{t-1}`, `z_{t-1}` and the constant.
    pub pi_row: [f64; 3],
    pub own_lags: Vec<f64>,
    pub other_lags: Vec<f64>,
    pub r_squared: f64,
    pub ols: OlsFit,
    /// Column offset of the first lag coefficient in `ols`.
    lag_offset: usize,
}

impl VecmEquation {
    fn block_columns(&self, block: LagBlock, lags: usize) -> std::ops::Range<usize> {
        let start = match block {
            LagBlock::Own => self.lag_offset,
            LagBlock::Other => self.lag_offset + lags,
        };
        start..start + lags
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmFit {
    pub lag_order: usize,
    pub rank: usize,
    pub n_obs: usize,
    pub longrun_slope: f64,
    pub longrun_intercept: f64,
    /// Equations for `Δy` and `Δz`, in that order.
    pub equations: [VecmEquation; 2],
    pub johansen: JohansenResult,
    /// False when the requested rank differs from the one the rank test
    /// selects.
    pub rank_matches_test: bool,
}

/// Level-form VAR(p + 1): `Y_t = c + Σ_i B_i Y_{t-i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelVar {
    pub constant: [f64; 2],
    /// `B_1 .. B_{p+1}`, row-major 2x2.
    pub matrices: Vec<[[f64; 2]; 2]>,
}

impl LevelVar {
    /// One-step predictions of `(y_t, z_t)` for `t = order..n`.
    pub fn predict(&self, y: &[f64], z: &[f64]) -> Vec<[f64; 2]> {
        let order = self.matrices.len();
        let levels = [y, z];
        (order..y.len())
            .map(|t| {
                let mut out = self.constant;
                for (i, b) in self.matrices.iter().enumerate() {
                    for (row, out_row) in out.iter_mut().enumerate() {
                        *out_row += b[row][0] * levels[0][t - i - 1] + b[row][1] * levels[1][t - i - 1];
                    }
                }
                out
            })
            .collect()
    }
}

struct Design {
    responses: [DVector<f64>; 2],
    x: [DMatrix<f64>; 2],
    lag_offset: usize,
}

fn build_design(levels: [&[f64]; 2], lags: usize, rank: usize, slope: f64, intercept: f64) -> Result<Design> {
    let n = levels[0].len();
    let start = lags + 1;
    let rows = n - start;
    let det_cols = match rank {
        0 => 0,
        1 => 1,
        2 => 3,
        r => return Err(Error::InvalidParameter(format!("rank {r} is not 0, 1 or 2"))),
    };
    if det_cols + 2 * lags == 0 {
        return Err(Error::InvalidParameter(
            "rank 0 with no lags leaves no regressors".into(),
        ));
    }
    let diff = |var: usize, t: usize| levels[var][t] - levels[var][t - 1];
    let build = |eq: usize| {
        let other = 1 - eq;
        DMatrix::from_fn(rows, det_cols + 2 * lags, |r, c| {
            let t = start + r;
            match (rank, c) {
                (1, 0) => levels[0][t - 1] - slope * levels[1][t - 1] - intercept,
                (2, 0) => levels[0][t - 1],
                (2, 1) => levels[1][t - 1],
                (2, 2) => 1.0,
                _ => {
                    let j = c - det_cols;
                    let (var, lag) = if j < lags { (eq, j + 1) } else { (other, j - lags + 1) };
                    diff(var, t - lag)
                }
            }
        })
    };
    let response = |eq: usize| DVector::from_fn(rows, |r, _| diff(eq, start + r));
    Ok(Design {
        responses: [response(0), response(1)],
        x: [build(0), build(1)],
        lag_offset: det_cols,
    })
}

/// Fits both short-run equations by OLS, conditional on the Johansen
/// long-run vector.
pub fn vecm_fit(y: &TimeSeries, z: &TimeSeries, lags: usize, rank: usize) -> Result<VecmFit> {
    let (y, z) = align(y, z)?;
    vecm_fit_values(y.values(), z.values(), lags, rank)
}

pub fn vecm_fit_values(y: &[f64], z: &[f64], lags: usize, rank: usize) -> Result<VecmFit> {
    let johansen = johansen_values(y, z, lags, Level::FivePercent)?;
    let slope = johansen.longrun_slope();
    let intercept = johansen.longrun_intercept;
    let design = build_design([y, z], lags, rank, slope, intercept)?;

    let mut equations = Vec::with_capacity(2);
    for (eq, response) in [Variable::Y, Variable::Z].into_iter().enumerate() {
        let fit = ols_matrix(&design.responses[eq], &design.x[eq])?;
        let c = &fit.coefficients;
        let off = design.lag_offset;
        let (loading, pi_row) = match rank {
            0 => (None, [0.0; 3]),
            1 => (Some(c[0]), [c[0], -c[0] * slope, -c[0] * intercept]),
            _ => (None, [c[0], c[1], c[2]]),
        };
        let (loading_std_error, loading_t_stat) = if rank == 1 {
            (Some(fit.std_errors[0]), Some(fit.t_stats[0]))
        } else {
            (None, None)
        };
        equations.push(VecmEquation {
            response,
            loading,
            loading_std_error,
            loading_t_stat,
            pi_row,
            own_lags: c[off..off + lags].to_vec(),
            other_lags: c[off + lags..off + 2 * lags].to_vec(),
            r_squared: fit.r_squared,
            lag_offset: off,
            ols: fit,
        });
    }
    let [eq_y, eq_z]: [VecmEquation; 2] = equations.try_into().expect("two equations");
    Ok(VecmFit {
        lag_order: lags,
        rank,
        n_obs: y.len() - lags - 1,
        longrun_slope: slope,
        longrun_intercept: intercept,
        rank_matches_test: johansen.selected_rank == rank,
        johansen,
        equations: [eq_y, eq_z],
    })
}

impl VecmFit {
    /// `Γ_i[eq][var]`: coefficient of `Δvar_{t-i}` in equation `eq`.
    fn gamma(&self, i: usize) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for (eq, e) in self.equations.iter().enumerate() {
            g[eq][eq] = e.own_lags[i];
            g[eq][1 - eq] = e.other_lags[i];
        }
        g
    }

    /// One-step level predictions `Y_{t-1} + ΔŶ_t` for `t = p+1..n`.
    pub fn predict_levels(&self, y: &[f64], z: &[f64]) -> Vec<[f64; 2]> {
        let p = self.lag_order;
        let levels = [y, z];
        (p + 1..y.len())
            .map(|t| {
                let mut out = [0.0; 2];
                for (eq, e) in self.equations.iter().enumerate() {
                    let mut d = e.pi_row[0] * y[t - 1] + e.pi_row[1] * z[t - 1] + e.pi_row[2];
                    for i in 0..p {
                        for var in 0..2 {
                            let g = if var == eq { e.own_lags[i] } else { e.other_lags[i] };
                            d += g * (levels[var][t - 1 - i] - levels[var][t - 2 - i]);
                        }
                    }
                    out[eq] = levels[eq][t - 1] + d;
                }
                out
            })
            .collect()
    }
}

/// Rewrites the error-correction form as a VAR(p + 1) in levels.
pub fn vecm_to_var(fit: &VecmFit) -> LevelVar {
    let p = fit.lag_order;
    let pi = [fit.equations[0].pi_row, fit.equations[1].pi_row];
    let mut matrices = Vec::with_capacity(p + 1);
    let mut b1 = [[0.0; 2]; 2];
    for row in 0..2 {
        for col in 0..2 {
            b1[row][col] = if row == col { 1.0 } else { 0.0 } + pi[row][col];
        }
    }
    if p > 0 {
        let g1 = fit.gamma(0);
        for row in 0..2 {
            for col in 0..2 {
                b1[row][col] += g1[row][col];
            }
        }
    }
    matrices.push(b1);
    for i in 1..p {
        let (gi, gprev) = (fit.gamma(i), fit.gamma(i - 1));
        let mut b = [[0.0; 2]; 2];
        for row in 0..2 {
            for col in 0..2 {
                b[row][col] = gi[row][col] - gprev[row][col];
            }
        }
        matrices.push(b);
    }
    if p > 0 {
        let gp = fit.gamma(p - 1);
        matrices.push(gp.map(|r| r.map(|v| -v)));
    }
    LevelVar {
        constant: [pi[0][2], pi[1][2]],
        matrices,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrangerTest {
    pub statistic: f64,
    pub p_value: f64,
    pub df_numerator: usize,
    pub df_denominator: usize,
}

/// Joint F test that a lag block of one equation is zero.
pub fn granger_block_test(fit: &VecmFit, equation: Variable, block: LagBlock) -> Result<GrangerTest> {
    let p = fit.lag_order;
    if p == 0 {
        return Err(Error::InvalidParameter("lag block is empty".into()));
    }
    let eq = &fit.equations[equation.index()];
    let cols: Vec<usize> = eq.block_columns(block, p).collect();
    let b = DVector::from_iterator(p, cols.iter().map(|&c| eq.ols.coefficients[c]));
    let v = DMatrix::from_fn(p, p, |i, j| eq.ols.covariance_at(cols[i], cols[j]));
    let v_inv = v
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("coefficient covariance not positive definite".into()))?
        .inverse();
    let wald = (b.transpose() * v_inv * &b)[(0, 0)];
    let statistic = wald / p as f64;
    let df2 = eq.ols.n_obs - eq.ols.n_params;
    let dist = FisherSnedecor::new(p as f64, df2 as f64)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let p_value = (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0);
    Ok(GrangerTest {
        statistic,
        p_value,
        df_numerator: p,
        df_denominator: df2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::synth_cointegrated_pair;

    fn pair(seed: u64) -> (Vec<f64>, Vec<f64>) {
        let (y, z) = synth_cointegrated_pair(1.0, 0.2, 0.6, 0.5, 1.0, 600, seed).unwrap();
        (y.values().to_vec(), z.values().to_vec())
    }

    #[test]
    fn var_form_reproduces_vecm_predictions() {
        for lags in [0, 1, 3] {
            for rank in [0, 1, 2] {
                if rank == 0 && lags == 0 {
                    continue;
                }
                let (y, z) = pair(5 + lags as u64);
                let fit = vecm_fit_values(&y, &z, lags, rank).unwrap();
                let var = vecm_to_var(&fit);
                assert_eq!(var.matrices.len(), lags + 1);
                let a = fit.predict_levels(&y, &z);
                let b = var.predict(&y, &z);
                assert_eq!(a.len(), b.len());
                for (pa, pb) in a.iter().zip(&b) {
                    assert!((pa[0] - pb[0]).abs() < 1e-10 && (pa[1] - pb[1]).abs() < 1e-10);
                }
                // predictions are the fitted values of the regressions
                let fitted_dy = fit.equations[0].ols.residuals.len();
                assert_eq!(fitted_dy, y.len() - lags - 1);
            }
        }
    }

    #[test]
    fn zero_model_is_random_walk() {
        let (y, z) = pair(1);
        let mut fit = vecm_fit_values(&y, &z, 2, 1).unwrap();
        for e in &mut fit.equations {
            e.pi_row = [0.0; 3];
            e.own_lags.iter_mut().for_each(|v| *v = 0.0);
            e.other_lags.iter_mut().for_each(|v| *v = 0.0);
        }
        let var = vecm_to_var(&fit);
        assert_eq!(var.matrices[0], [[1.0, 0.0], [0.0, 1.0]]);
        assert!(var.matrices[1..].iter().all(|m| *m == [[0.0; 2]; 2]));
        assert_eq!(var.constant, [0.0, 0.0]);
    }

    #[test]
    fn loading_sign_and_empty_block() {
        let (y, z) = pair(2);
        let fit = vecm_fit_values(&y, &z, 0, 1).unwrap();
        assert!(fit.equations[0].loading.unwrap() < 0.0);
        assert_eq!(fit.equations[0].ols.residuals.len(), y.len() - 1);
        assert!(matches!(
            granger_block_test(&fit, Variable::Z, LagBlock::Other),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn full_rank_request_is_flagged() {
        let (y, z) = pair(3);
        let fit = vecm_fit_values(&y, &z, 1, 2).unwrap();
        assert_eq!(fit.rank, 2);
        assert!(!fit.rank_matches_test);
        assert!(fit.equations[0].loading.is_none());
    }
}
