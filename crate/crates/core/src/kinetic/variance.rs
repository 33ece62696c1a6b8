//! Dispersion of opinions around the sentiment.
//!
//! Two right-hand sides are provided. [`VarianceVariant::Paper`] is the
//! published equation, kept verbatim. [`VarianceVariant::Corrected`] is
//! re-derived from the jump-drift reading of the kinetic equation (drift
//! `alpha (s - x)`, jumps at rate `beta` to the interaction rule):
//!
//! `dV/dt = [-2 alpha + beta (q^2 - 2q)] V + beta q^2 (s - X(1 + delta))^2`.
//!
//! The corrected form keeps `V >= 0`; the particle simulator agrees with it.

use serde::{Deserialize, Serialize};

use super::sentiment::check_grid;
use super::{ForcingPath, KineticParams, SentimentPath};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceVariant {
    Paper,
    #[default]
    Corrected,
}

impl std::str::FromStr for VarianceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "corrected" => Ok(Self::Corrected),
            other => Err(Error::InvalidParameter(format!("unknown variance variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMethod {
    /// Integrating factor with exact exponentials.
    #[default]
    ClosedForm,
    /// RK4 on the joint (sentiment, variance) system.
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariancePath {
    pub t_grid: Vec<f64>,
    pub v_values: Vec<f64>,
    pub variant: VarianceVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Stable,
    Unstable,
}

/// Coefficient of `V` in the variance equation and the regime it implies.
pub fn gamma_coefficient(params: &KineticParams, variant: VarianceVariant) -> (f64, Regime) {
    let contraction = params.beta * (params.q * params.q - 2.0 * params.q);
    let gamma = match variant {
        VarianceVariant::Paper => 2.0 * params.alpha + contraction,
        VarianceVariant::Corrected => -2.0 * params.alpha + contraction,
    };
    let regime = if gamma > 0.0 {
        Regime::Unstable
    } else {
        Regime::Stable
    };
    (gamma, regime)
}

/// Source term: the right-hand side with the `gamma V` part removed.
fn source(params: &KineticParams, s: f64, index_level: f64, variant: VarianceVariant) -> f64 {
    let (q, beta) = (params.q, params.beta);
    let y = params.target(index_level);
    match variant {
        VarianceVariant::Paper => {
            beta * (q * q - 2.0 * q) * s * s
                + 2.0 * beta * q * (1.0 - 2.0 * q) * y * s
                + beta * q * q * y * y
        }
        VarianceVariant::Corrected => beta * q * q * (s - y) * (s - y),
    }
}

pub fn variance_rhs(
    params: &KineticParams,
    v: f64,
    s: f64,
    index_level: f64,
    variant: VarianceVariant,
) -> f64 {
    gamma_coefficient(params, variant).0 * v + source(params, s, index_level, variant)
}

/// `(e^z - 1) / z`
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z) / z^2`
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Variance path on the sentiment path's grid.
///
/// The closed form is `V(t) = e^{γt} [V0 + ∫_0^t e^{-γτ} g(τ) dτ]`, evaluated
/// step by step with exact exponentials and the source `g` taken linear
/// between grid points.
pub fn variance_solve(
    params: &KineticParams,
    s_path: &SentimentPath,
    forcing: &ForcingPath,
    v0: f64,
    variant: VarianceVariant,
    method: VarianceMethod,
) -> Result<VariancePath> {
    params.validate()?;
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::InvalidParameter(format!("initial variance must be >= 0, got {v0}")));
    }
    let grid = &s_path.t_grid;
    check_grid(grid)?;
    if grid.len() != s_path.s_values.len() {
        return Err(Error::LengthMismatch(grid.len(), s_path.s_values.len()));
    }
    forcing.check_covers(*grid.last().expect("nonempty"))?;
    let (gamma, _) = gamma_coefficient(params, variant);

    let v_values = match method {
        VarianceMethod::ClosedForm => {
            let mut out = Vec::with_capacity(grid.len());
            let g_at = |i: usize| source(params, s_path.s_values[i], forcing.value_at(grid[i]), variant);
            let mut v = v0;
            // the path's first point may sit after t = 0; the sentiment there is
            // known but not before it, so V0 is taken to hold at grid[0]
            out.push(v);
            for i in 1..grid.len() {
                let h = grid[i] - grid[i - 1];
                let (g0, g1) = (g_at(i - 1), g_at(i));
                let z = gamma * h;
                v = z.exp() * v + h * (g0 * phi1(z) + (g1 - g0) * phi2(z));
                out.push(v);
            }
            out
        }
        VarianceMethod::Rk4 => {
            let k = params.k();
            let rhs = |t: f64, s: f64, v: f64| {
                let x = forcing.value_at(t);
                (
                    k * (params.target(x) - s),
                    gamma * v + source(params, s, x, variant),
                )
            };
            let mut out = Vec::with_capacity(grid.len());
            let (mut s, mut v) = (s_path.s_values[0], v0);
            out.push(v);
            for i in 1..grid.len() {
                let (t, h) = (grid[i - 1], grid[i] - grid[i - 1]);
                let (a1, b1) = rhs(t, s, v);
                let (a2, b2) = rhs(t + 0.5 * h, s + 0.5 * h * a1, v + 0.5 * h * b1);
                let (a3, b3) = rhs(t + 0.5 * h, s + 0.5 * h * a2, v + 0.5 * h * b2);
                let (a4, b4) = rhs(t + h, s + h * a3, v + h * b3);
                s += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
                v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
                out.push(v);
            }
            out
        }
    };
    Ok(VariancePath {
        t_grid: grid.clone(),
        v_values,
        variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::{sentiment_closed_form, uniform_grid};

    #[test]
    fn rhs_examples() {
        let p = KineticParams::new(0.28, 6.05, 0.143, 0.7).unwrap();
        let x = 2000.0;
        let s = p.target(x);
        assert_eq!(variance_rhs(&p, 0.0, s, x, VarianceVariant::Corrected), 0.0);

        let p = KineticParams::new(0.5, 1.0, 0.0, 0.0).unwrap();
        let v = variance_rhs(&p, 1.0, 0.0, 0.0, VarianceVariant::Corrected);
        assert!((v + 0.75).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let p = KineticParams::new(0.5, 2.0, 0.0, 1.0).unwrap();
        let (g, regime) = gamma_coefficient(&p, VarianceVariant::Paper);
        assert!((g - 0.5).abs() < 1e-15);
        assert_eq!(regime, Regime::Unstable);

        let p = KineticParams::new(0.5, 1.0, 0.0, 2.0).unwrap();
        let (g, regime) = gamma_coefficient(&p, VarianceVariant::Paper);
        assert!((g - 3.25).abs() < 1e-15);
        assert_eq!(regime, Regime::Unstable);
        assert!(2.0 * p.alpha > p.beta * p.q * (2.0 - p.q));

        let (g, regime) = gamma_coefficient(&p, VarianceVariant::Corrected);
        assert!(g < 0.0);
        assert_eq!(regime, Regime::Stable);

        let p = KineticParams::new(0.3, 5.0, 0.1, 0.0).unwrap();
        let (gp, _) = gamma_coefficient(&p, VarianceVariant::Paper);
        let (gc, rc) = gamma_coefficient(&p, VarianceVariant::Corrected);
        assert_eq!(gp, gc);
        assert_eq!(rc, Regime::Stable);
    }

    #[test]
    fn homogeneous_decay() {
        let p = KineticParams::new(0.28, 6.05, 0.143, 0.5).unwrap();
        let x = 2000.0;
        let f = ForcingPath::constant(x, 2.0).unwrap();
        let grid = uniform_grid(2.0, 200);
        let s = sentiment_closed_form(&p, &f, p.target(x), &grid).unwrap();
        let (gamma, _) = gamma_coefficient(&p, VarianceVariant::Corrected);
        for method in [VarianceMethod::ClosedForm, VarianceMethod::Rk4] {
            let path = variance_solve(&p, &s, &f, 400.0, VarianceVariant::Corrected, method).unwrap();
            for (t, v) in grid.iter().zip(&path.v_values) {
                let exact = 400.0 * (gamma * t).exp();
                assert!((v - exact).abs() <= 1e-8 * 400.0, "{method:?} t={t}");
            }
        }
    }

    #[test]
    fn closed_form_matches_rk4() {
        let p = KineticParams::new(0.28, 6.05, 0.143, 0.8).unwrap();
        let n = 5040;
        let dt = 1.0 / 2520.0;
        let values: Vec<f64> = (0..=n)
            .map(|i| 2000.0 * (1.0 + 0.1 * (std::f64::consts::TAU * i as f64 * dt).sin()))
            .collect();
        let f = ForcingPath::new(values, dt, crate::kinetic::Interpolation::Linear).unwrap();
        let grid = uniform_grid(2.0, n);
        let s = sentiment_closed_form(&p, &f, 1900.0, &grid).unwrap();
        for variant in [VarianceVariant::Corrected, VarianceVariant::Paper] {
            let a = variance_solve(&p, &s, &f, 2500.0, variant, VarianceMethod::ClosedForm).unwrap();
            let b = variance_solve(&p, &s, &f, 2500.0, variant, VarianceMethod::Rk4).unwrap();
            let scale = b.v_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (va, vb) in a.v_values.iter().zip(&b.v_values) {
                assert!((va - vb).abs() < 1e-6 * scale, "{variant:?}: {va} vs {vb}");
            }
            if variant == VarianceVariant::Corrected {
                assert!(a.v_values.iter().all(|v| *v >= -1e-12 * scale));
            }
        }
    }

    #[test]
    fn published_variant_turns_negative_from_degenerate_start() {
        let p = KineticParams::reference();
        let x = 2000.0;
        let f = ForcingPath::constant(x, 1.0).unwrap();
        let grid = uniform_grid(1.0 / 2520.0, 1);
        let s = sentiment_closed_form(&p, &f, p.target(x), &grid).unwrap();
        let paper = variance_solve(&p, &s, &f, 0.0, VarianceVariant::Paper, VarianceMethod::Rk4).unwrap();
        assert!(paper.v_values[1] < 0.0);
        let expected_slope = -2.0 * p.beta * p.q * p.q * p.target(x).powi(2);
        assert!((variance_rhs(&p, 0.0, p.target(x), x, VarianceVariant::Paper) - expected_slope).abs()
            < 1e-9 * expected_slope.abs());
        let fixed =
            variance_solve(&p, &s, &f, 0.0, VarianceVariant::Corrected, VarianceMethod::Rk4).unwrap();
        assert_eq!(fixed.v_values[1], 0.0);
    }
}
