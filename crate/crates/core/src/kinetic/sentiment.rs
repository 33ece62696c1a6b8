//! The mean opinion ("sentiment") `s(t)`, which obeys
//! `ds/dt = q beta [X(t)(1 + delta) - s]` independently of `alpha`.

use serde::{Deserialize, Serialize};

use super::{ForcingPath, Interpolation, KineticParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentPath {
    pub t_grid: Vec<f64>,
    pub s_values: Vec<f64>,
}

/// One interaction: the forecast `x` moves toward the premium-adjusted index.
pub fn interaction_rule(x: f64, index_level: f64, params: &KineticParams) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("forecast must be nonnegative, got {x}")));
    }
    if !(index_level > 0.0 && index_level.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "index level must be positive, got {index_level}"
        )));
    }
    Ok(post_interaction(x, index_level, params))
}

#[inline]
pub(crate) fn post_interaction(x: f64, index_level: f64, params: &KineticParams) -> f64 {
    (1.0 - params.q) * x + params.q * params.target(index_level)
}

/// `(1 - e^{-z}) / z`, continuous at 0.
#[inline]
fn relax_weight(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidTimeStep("empty time grid".into()));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidTimeStep(
            "time grid must be nonnegative and nondecreasing".into(),
        ));
    }
    Ok(())
}

/// Advances the exact solution from `ta` to `tb`, splitting at observation
/// knots so the forcing is linear (or constant) on every piece.
fn advance_exact(params: &KineticParams, forcing: &ForcingPath, mut s: f64, ta: f64, tb: f64) -> f64 {
    let k = params.k();
    let mut t = ta;
    while t < tb {
        let te = forcing.next_knot_after(t).map_or(tb, |knot| knot.min(tb));
        let h = te - t;
        let decay = (-k * h).exp();
        match forcing.interpolation() {
            Interpolation::Linear => {
                let y0 = params.target(forcing.value_at(t));
                let y1 = params.target(forcing.value_at(te));
                s = y1 - (y1 - y0) * relax_weight(k * h) + (s - y0) * decay;
            }
            Interpolation::PiecewiseConstant => {
                let y = params.target(forcing.value_at(0.5 * (t + te)));
                s = y + (s - y) * decay;
            }
        }
        t = te;
    }
    s
}

/// Evaluates
/// `s(t) = s0 e^{-k t} + k ∫_0^t X(θ)(1 + delta) e^{k(θ - t)} dθ`, `k = q beta`,
/// on `t_grid`. The convolution is integrated exactly for the interpolated
/// forcing, so the result is exact for constant and piecewise-linear `X`.
pub fn sentiment_closed_form(
    params: &KineticParams,
    forcing: &ForcingPath,
    s0: f64,
    t_grid: &[f64],
) -> Result<SentimentPath> {
    params.validate()?;
    check_grid(t_grid)?;
    forcing.check_covers(*t_grid.last().expect("nonempty"))?;
    let mut s_values = Vec::with_capacity(t_grid.len());
    let mut s = s0;
    let mut t = 0.0;
    for &tn in t_grid {
        s = advance_exact(params, forcing, s, t, tn);
        t = tn;
        s_values.push(s);
    }
    Ok(SentimentPath {
        t_grid: t_grid.to_vec(),
        s_values,
    })
}

/// Classical fourth-order Runge-Kutta on the sentiment ODE, with the forcing
/// interpolated at the stage times.
pub fn sentiment_rk4(
    params: &KineticParams,
    forcing: &ForcingPath,
    s0: f64,
    t_grid: &[f64],
) -> Result<SentimentPath> {
    params.validate()?;
    check_grid(t_grid)?;
    forcing.check_covers(*t_grid.last().expect("nonempty"))?;
    let k = params.k();
    let rhs = |t: f64, s: f64| k * (params.target(forcing.value_at(t)) - s);
    let mut s_values = Vec::with_capacity(t_grid.len());
    let mut s = s0;
    let mut t = 0.0;
    for &tn in t_grid {
        let h = tn - t;
        if h > 0.0 {
            let k1 = rhs(t, s);
            let k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
            let k4 = rhs(tn, s + h * k3);
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t = tn;
        s_values.push(s);
    }
    Ok(SentimentPath {
        t_grid: t_grid.to_vec(),
        s_values,
    })
}

/// `n + 1` equally spaced times on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}
