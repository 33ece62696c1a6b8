use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{KineticParams, SentimentPath};

pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Density values on the uniform grid `x_i = i * x_max / (n - 1)`. Outside
/// `[0, x_max]` the density is taken to be zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDistribution {
    x_grid: Vec<f64>,
    f_values: Vec<f64>,
    time: f64,
}

impl GridDistribution {
    pub fn new(x_max: f64, f_values: Vec<f64>, time: f64) -> Result<Self> {
        let n = f_values.len();
        if n < 2 {
            return Err(Error::GridTooCoarse(format!("{n} grid points")));
        }
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("x_max must be positive, got {x_max}")));
        }
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::InvalidTimeStep(format!("time {time}")));
        }
        if let Some(i) = f_values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "density must be finite and nonnegative, got {} at index {i}",
                f_values[i]
            )));
        }
        if f_values[0] != 0.0 {
            return Err(Error::InvalidParameter("density must vanish at x = 0".into()));
        }
        let dx = x_max / (n - 1) as f64;
        let x_grid = (0..n).map(|i| i as f64 * dx).collect();
        Ok(Self { x_grid, f_values, time })
    }

    /// Samples `f` on the grid; the value at `x = 0` is set to zero.
    pub fn from_fn(x_max: f64, n: usize, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooCoarse(format!("{n} grid points")));
        }
        let dx = x_max / (n - 1) as f64;
        let values = (0..n).map(|i| if i == 0 { 0.0 } else { f(i as f64 * dx) }).collect();
        Self::new(x_max, values, time)
    }

    /// Unit-mass lognormal density with the given mean and relative standard
    /// deviation.
    pub fn lognormal(mean: f64, rel_width: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(mean > 0.0 && rel_width > 0.0) {
            return Err(Error::InvalidParameter("lognormal mean and width must be positive".into()));
        }
        let sigma2 = (1.0 + rel_width * rel_width).ln();
        let mu = mean.ln() - 0.5 * sigma2;
        let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma2).sqrt();
        Self::from_fn(x_max, n, 0.0, |x| {
            norm / x * (-(x.ln() - mu).powi(2) / (2.0 * sigma2)).exp()
        })
    }

    /// `4 max(X) (1 + delta)`.
    pub fn default_x_max(max_index: f64, params: &KineticParams) -> f64 {
        4.0 * params.target(max_index)
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.f_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_values.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        *self.x_grid.last().expect("at least two points")
    }

    pub fn dx(&self) -> f64 {
        self.x_grid[1]
    }

    pub fn sup_norm(&self) -> f64 {
        self.f_values.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoid mass.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.f_values, self.dx())
    }

    /// Linear interpolation, zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        interpolate(&self.f_values, self.dx(), x)
    }

    pub(crate) fn with_values(&self, f_values: Vec<f64>, time: f64) -> Self {
        Self {
            x_grid: self.x_grid.clone(),
            f_values,
            time,
        }
    }
}

pub(crate) fn trapezoid(f: &[f64], dx: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    dx * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
}

#[inline]
pub(crate) fn interpolate(f: &[f64], dx: f64, x: f64) -> f64 {
    let pos = x / dx;
    let last = f.len() - 1;
    if !(pos >= 0.0) || pos > last as f64 {
        return 0.0;
    }
    let i = (pos.floor() as usize).min(last - 1);
    let w = pos - i as f64;
    (1.0 - w) * f[i] + w * f[i + 1]
}

/// `alpha ∫_0^t s(θ) e^{alpha θ} dθ` by the trapezoid rule on the points of
/// `s_path`, the last partial interval interpolated.
pub(crate) fn characteristic_shift(alpha: f64, s_path: &SentimentPath, t: f64) -> Result<f64> {
    let (grid, s) = (&s_path.t_grid, &s_path.s_values);
    let last = *grid.last().ok_or(Error::EmptySeries)?;
    if grid[0] > 0.0 || t > last + 1e-12 * last.max(1.0) {
        return Err(Error::PathTooShort {
            requested: t,
            available: last,
        });
    }
    if alpha == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let g = |i: usize| s[i] * (alpha * grid[i]).exp();
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let (ta, tb) = (grid[i - 1], grid[i]);
        if ta >= t {
            break;
        }
        if tb <= t {
            acc += 0.5 * (tb - ta) * (g(i - 1) + g(i));
        } else {
            let w = (t - ta) / (tb - ta);
            let s_t = s[i - 1] + w * (s[i] - s[i - 1]);
            acc += 0.5 * (t - ta) * (g(i - 1) + s_t * (alpha * t).exp());
        }
    }
    Ok(alpha * acc)
}

pub(crate) fn transport(f_in: &GridDistribution, params: &KineticParams, t: f64, shift: f64) -> Result<GridDistribution> {
    if t == 0.0 {
        return Ok(f_in.with_values(f_in.f_values().to_vec(), 0.0));
    }
    let (alpha, beta) = (params.alpha, params.beta);
    let stretch = (alpha * t).exp();
    let dx = f_in.dx();
    let x_max = f_in.x_max();
    let probe = 0.5 * x_max * stretch - shift;
    if probe > x_max + dx {
        return Err(Error::GridTooCoarse(format!(
            "characteristic from x = {} at t = {t} leaves the grid (reaches {probe})",
            0.5 * x_max
        )));
    }
    let weight = ((alpha - beta) * t).exp();
    let values = f_in
        .x_grid()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let back = x * stretch - shift;
            if i == 0 || back < 0.0 {
                0.0
            } else {
                weight * f_in.value_at(back)
            }
        })
        .collect();
    Ok(f_in.with_values(values, t))
}

/// First term of the integral form: `f_in` carried along the drift
/// characteristics to time `t`, weighted by `e^{(alpha - beta) t}`.
///
/// `s_path` must start at 0 and reach `t`.
pub fn transported_initial(
    f_in: &GridDistribution,
    params: &KineticParams,
    s_path: &SentimentPath,
    t: f64,
) -> Result<GridDistribution> {
    params.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTimeStep(format!("time {t}")));
    }
    let shift = characteristic_shift(params.alpha, s_path, t)?;
    transport(f_in, params, t, shift)
}
