use serde::{Deserialize, Serialize};

use super::{GridDistribution, ParticleEnsemble};
use crate::error::{Error, Result};

/// Zeroth to second moments plus the derived mean and variance
/// `m2 / m0 - (m1 / m0)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    fn from_raw(m0: f64, m1: f64, m2: f64) -> Result<Self> {
        if !(m0 > 0.0) {
            return Err(Error::EmptyEnsemble);
        }
        let mean = m1 / m0;
        Ok(Self {
            m0,
            m1,
            m2,
            mean,
            variance: (m2 / m0 - mean * mean).max(0.0),
        })
    }
}

pub trait HasMoments {
    fn moments(&self) -> Result<Moments>;
}

impl HasMoments for GridDistribution {
    /// Trapezoid moments on the grid.
    fn moments(&self) -> Result<Moments> {
        let (x, f) = (self.x_grid(), self.f_values());
        let dx = self.dx();
        let n = f.len();
        let mut raw = [0.0; 3];
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 * dx } else { dx };
            raw[0] += w * f[i];
            raw[1] += w * f[i] * x[i];
            raw[2] += w * f[i] * x[i] * x[i];
        }
        Moments::from_raw(raw[0], raw[1], raw[2])
    }
}

impl HasMoments for ParticleEnsemble {
    /// Sample moments with population normalisation; `m0` is the particle
    /// count and `m1`, `m2` are sums.
    fn moments(&self) -> Result<Moments> {
        let x = self.positions();
        if x.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let variance = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Ok(Moments {
            m0: n,
            m1: mean * n,
            m2: (variance + mean * mean) * n,
            mean,
            variance,
        })
    }
}

pub fn moments_of<D: HasMoments + ?Sized>(dist: &D) -> Result<Moments> {
    dist.moments()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_examples() {
        let point = ParticleEnsemble::new(vec![3.5; 10]).unwrap();
        let m = moments_of(&point).unwrap();
        assert_eq!((m.mean, m.variance), (3.5, 0.0));
        let two = ParticleEnsemble::new(vec![0.0, 2.0]).unwrap();
        let m = moments_of(&two).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 1.0));
    }

    #[test]
    fn gaussian_bump_on_grid() {
        let (mu, sd): (f64, f64) = (10.0, 1.5);
        let g = GridDistribution::from_fn(40.0, 2048, 0.0, |x| {
            (-(x - mu).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
        })
        .unwrap();
        let m = moments_of(&g).unwrap();
        assert!((m.m0 - 1.0).abs() < 1e-4);
        assert!((m.mean - mu).abs() < 1e-4);
        assert!((m.variance - sd * sd).abs() < 1e-4);
    }

    #[test]
    fn zero_grid_has_no_moments() {
        let g = GridDistribution::new(1.0, vec![0.0; 8], 0.0).unwrap();
        assert!(matches!(moments_of(&g), Err(Error::EmptyEnsemble)));
    }
}
