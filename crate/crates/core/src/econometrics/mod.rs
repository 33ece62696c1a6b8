//! Unit-root and cointegration testing, error-correction models and
//! residual diagnostics for a pair of log price series.

mod adf;
mod critical;
mod diagnostics;
mod engle_granger;
mod johansen;
mod lags;
mod ols;
mod vecm;

pub use adf::{adf_test, default_max_lag, AdfResult, DeterministicSpec, LagRule};
pub use critical::{
    ByLevel, Level, DF_CONSTANT, DF_NONE, DF_TREND, JOHANSEN_R_EQ_0, JOHANSEN_R_LE_1,
};
pub use diagnostics::{arch_lm, breusch_godfrey, jarque_bera, DiagnosticKind, DiagnosticResult};
pub use engle_granger::{engle_granger, EngleGrangerOptions, EngleGrangerResult, MIN_EG_LENGTH};
pub use johansen::{johansen, johansen_values, JohansenResult};
pub use lags::{var_lag_select, var_lag_select_values, CriteriaRow, LagSelection};
pub use ols::{ols, OlsFit};
pub use vecm::{
    granger_block_test, vecm_fit, vecm_fit_values, vecm_to_var, GrangerTest, LagBlock, LevelVar,
    VecmEquation, VecmFit, Variable,
};

use crate::error::{Error, Result};

/// Periods needed to close half of a deviation when it shrinks by the
/// factor `1 + gamma` each period: `ln(1/2) / ln(1 + gamma)`.
pub fn half_life(gamma: f64) -> Result<f64> {
    if !(gamma > -1.0 && gamma < 0.0) {
        return Err(Error::OutOfDomain(gamma));
    }
    Ok(0.5f64.ln() / gamma.ln_1p())
}
