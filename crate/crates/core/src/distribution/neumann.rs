use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{characteristic_shift, transport, GridDistribution};
use super::moments::HasMoments;
use crate::error::{Error, Result};
use crate::kinetic::{sentiment_closed_form, uniform_grid, ForcingPath, KineticParams};

/// Sub-steps per time slice for the sentiment path behind the
/// characteristics.
const SENTIMENT_SUBSTEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannConfig {
    /// Horizon `T` in years.
    pub horizon: f64,
    /// Stop once the sup-norm of the last term falls below
    /// `tol * sup f_in`.
    pub tol: f64,
    pub n_max: usize,
    /// Number of time intervals on `[0, T]`.
    pub n_slices: usize,
}

impl NeumannConfig {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            tol: 1e-8,
            n_max: 200,
            n_slices: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannSolution {
    /// `f` on the time slices `j T / n_slices`.
    pub slices: Vec<GridDistribution>,
    /// Sup-norm over all slices of each term `T^n F(f_in)`, starting at n = 0.
    pub term_norms: Vec<f64>,
    /// Sup-norm of `f - F(f_in) - T f`.
    pub residual: f64,
    pub initial_mass: f64,
    /// `initial_mass - mass(f(t))` per slice, including what the dilation
    /// pushes past `x_max`.
    pub lost_mass: Vec<f64>,
    pub converged: bool,
}

impl NeumannSolution {
    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.time()).collect()
    }

    pub fn terminal(&self) -> &GridDistribution {
        self.slices.last().expect("at least one slice")
    }
}

/// `(beta T / (1 - q))^n / n!`.
pub fn neumann_norm_bound(params: &KineticParams, horizon: f64, n: usize) -> f64 {
    let rate = params.beta * horizon / (1.0 - params.q);
    (1..=n).fold(1.0, |acc, i| acc * rate / i as f64)
}

/// Primitive of the piecewise-linear interpolant of `g`, zero to the left
/// of the grid and constant to the right of it.
struct Primitive<'a> {
    g: &'a [f64],
    cum: Vec<f64>,
    dx: f64,
}

impl<'a> Primitive<'a> {
    fn new(g: &'a [f64], dx: f64) -> Self {
        let mut cum = Vec::with_capacity(g.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in g.windows(2) {
            acc += 0.5 * dx * (w[0] + w[1]);
            cum.push(acc);
        }
        Self { g, cum, dx }
    }

    #[inline]
    fn at(&self, y: f64) -> f64 {
        let last = self.g.len() - 1;
        let pos = y / self.dx;
        if !(pos > 0.0) {
            return 0.0;
        }
        if pos >= last as f64 {
            return self.cum[last];
        }
        let m = pos as usize;
        let r = y - m as f64 * self.dx;
        self.cum[m] + r * self.g[m] + r * r / (2.0 * self.dx) * (self.g[m + 1] - self.g[m])
    }
}

struct Setup {
    times: Vec<f64>,
    shifts: Vec<f64>,
    targets: Vec<f64>,
    x_grid: Vec<f64>,
    dx: f64,
}

/// The gain operator: for each slice `t_i`,
///
/// `(T g)(t_i, x) = beta/(1-q) ∫_0^{t_i} e^{(alpha-beta)(t_i-θ)} g(θ, (ξ - q Y(θ))/(1-q)) dθ`,
///
/// with `ξ` the point at time `θ` on the drift characteristic through
/// `(t_i, x)` and `Y = X(1 + delta)`. The integrand is averaged over each
/// grid cell, which keeps the mass exact when the contraction toward `Y`
/// makes terms narrower than a cell; the time integral is a trapezoid over
/// the slices.
fn apply_gain(params: &KineticParams, setup: &Setup, g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (q, alpha, beta) = (params.q, params.alpha, params.beta);
    let dx = setup.dx;
    let n_x = setup.x_grid.len();
    let prims: Vec<Primitive> = g.iter().map(|slice| Primitive::new(slice, dx)).collect();
    let edges: Vec<f64> = (0..=n_x).map(|k| (k as f64 - 0.5) * dx).collect();
    (0..setup.times.len())
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; n_x];
            if i == 0 {
                return out;
            }
            let ti = setup.times[i];
            let h = ti / i as f64;
            let mut prim_edges = vec![0.0; n_x + 1];
            for j in 0..=i {
                let theta = setup.times[j];
                let w = if j == 0 || j == i { 0.5 * h } else { h };
                let lag = ti - theta;
                let stretch = (alpha * lag).exp();
                let c1 = stretch / (1.0 - q);
                let c0 = (-(-alpha * theta).exp() * (setup.shifts[i] - setup.shifts[j]) - q * setup.targets[j])
                    / (1.0 - q);
                let scale = w * beta / (1.0 - q) * ((alpha - beta) * lag).exp() / (c1 * dx);
                for (p, e) in prim_edges.iter_mut().zip(&edges) {
                    *p = prims[j].at(c1 * e + c0);
                }
                for k in 1..n_x {
                    out[k] += scale * (prim_edges[k + 1] - prim_edges[k]).max(0.0);
                }
            }
            out
        })
        .collect()
}

fn sup_norm(g: &[Vec<f64>]) -> f64 {
    g.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Solves `f = F(f_in) + T f` by summing the Neumann series on
/// `n_slices + 1` equally spaced time slices.
///
/// The sentiment behind the drift characteristics is the closed form
/// started from the mean of `f_in`. `n_max = 0` returns `F(f_in)` alone.
pub fn neumann_solve(
    params: &KineticParams,
    forcing: &ForcingPath,
    f_in: &GridDistribution,
    config: &NeumannConfig,
) -> Result<NeumannSolution> {
    params.validate()?;
    let t_end = config.horizon;
    if !(t_end > 0.0 && t_end.is_finite()) || config.n_slices == 0 {
        return Err(Error::InvalidTimeStep(format!(
            "horizon {t_end} with {} slices",
            config.n_slices
        )));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    forcing.check_covers(t_end)?;
    let m_in = f_in.moments()?;
    let dx = f_in.dx();
    let x_max = f_in.x_max();

    let times = uniform_grid(t_end, config.n_slices);
    let targets: Vec<f64> = times.iter().map(|t| params.target(forcing.value_at(*t))).collect();
    let y_max = targets.iter().copied().fold(0.0, f64::max);
    if y_max >= x_max - dx {
        return Err(Error::GridTooCoarse(format!(
            "interaction target {y_max} is outside the grid [0, {x_max}]"
        )));
    }
    if m_in.variance.sqrt() < 2.0 * dx / (1.0 - params.q) {
        return Err(Error::GridTooCoarse(format!(
            "spacing {dx} does not resolve the initial density (sd {})",
            m_in.variance.sqrt()
        )));
    }

    let fine = uniform_grid(t_end, config.n_slices * SENTIMENT_SUBSTEPS);
    let s_path = sentiment_closed_form(params, forcing, m_in.mean, &fine)?;
    let shifts = times
        .iter()
        .map(|t| characteristic_shift(params.alpha, &s_path, *t))
        .collect::<Result<Vec<_>>>()?;
    let first: Vec<Vec<f64>> = times
        .iter()
        .zip(&shifts)
        .map(|(t, s)| transport(f_in, params, *t, *s).map(|g| g.f_values().to_vec()))
        .collect::<Result<_>>()?;
    let setup = Setup {
        times,
        shifts,
        targets,
        x_grid: f_in.x_grid().to_vec(),
        dx,
    };

    let threshold = config.tol * f_in.sup_norm();
    let mut sum = first.clone();
    let mut term = first.clone();
    let mut term_norms = vec![sup_norm(&term)];
    let mut converged = config.n_max == 0 || term_norms[0] < threshold;
    let mut n = 0;
    while !converged && n < config.n_max {
        term = apply_gain(params, &setup, &term);
        n += 1;
        let norm = sup_norm(&term);
        term_norms.push(norm);
        for (s, t) in sum.iter_mut().zip(&term) {
            for (a, b) in s.iter_mut().zip(t) {
                *a += b;
            }
        }
        converged = norm < threshold;
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations: n,
            last_norm: *term_norms.last().expect("nonempty"),
        });
    }

    let gain = apply_gain(params, &setup, &sum);
    let mut residual = 0.0f64;
    for ((f, f0), tf) in sum.iter().zip(&first).zip(&gain) {
        for k in 0..f.len() {
            residual = residual.max((f[k] - f0[k] - tf[k]).abs());
        }
    }

    let slices: Vec<GridDistribution> = sum
        .into_iter()
        .zip(&setup.times)
        .map(|(values, t)| f_in.with_values(values, *t))
        .collect();
    let initial_mass = f_in.mass();
    let lost_mass = slices.iter().map(|s| initial_mass - s.mass()).collect();
    Ok(NeumannSolution {
        slices,
        term_norms,
        residual,
        initial_mass,
        lost_mass,
        converged,
    })
}
