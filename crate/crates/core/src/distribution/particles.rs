use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, LogNormal};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{post_interaction, ForcingPath, KineticParams};

/// A tenth of a trading day, in years.
pub const DEFAULT_PARTICLE_DT: f64 = 1.0 / 2520.0;

/// Fixed reduction blocks, so sums do not depend on the worker count.
const CHUNK: usize = 4096;

/// Forecasts held by a population of agents at `time`.
///
/// `steps` counts the time steps taken so far; together with the seed it
/// fixes the random substreams of a continued simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleEnsemble {
    positions: Vec<f64>,
    time: f64,
    steps: u64,
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if let Some(i) = positions.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "particle {i} has position {}",
                positions[i]
            )));
        }
        Ok(Self {
            positions,
            time: 0.0,
            steps: 0,
        })
    }

    /// `n` draws from a lognormal with the given mean and relative standard
    /// deviation.
    pub fn lognormal(n: usize, mean: f64, rel_width: f64, seed: u64) -> Result<Self> {
        if !(mean > 0.0 && rel_width >= 0.0) {
            return Err(Error::InvalidParameter("lognormal mean must be positive".into()));
        }
        let sigma2 = (1.0 + rel_width * rel_width).ln();
        let dist = LogNormal::new(mean.ln() - 0.5 * sigma2, sigma2.sqrt())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut rng = Pcg64Mcg::seed_from_u64(seed);
        Self::new((0..n).map(|_| dist.sample(&mut rng)).collect())
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    /// Upper bound on the step; each interval between record times is cut
    /// into equal steps no longer than this.
    pub dt: f64,
    /// Increasing times at which statistics are recorded.
    pub record_times: Vec<f64>,
    pub seed: u64,
    pub keep_snapshots: bool,
}

impl ParticleConfig {
    pub fn new(record_times: Vec<f64>, seed: u64) -> Self {
        Self {
            dt: DEFAULT_PARTICLE_DT,
            record_times,
            seed,
            keep_snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleRun {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Population variance of the positions.
    pub variance: Vec<f64>,
    /// `sd / sqrt(N)`.
    pub mean_se: Vec<f64>,
    /// `sqrt((m4 - V^2) / N)`, with `m4` the fourth central moment.
    pub variance_se: Vec<f64>,
    pub final_ensemble: ParticleEnsemble,
    /// Ensembles at the record times, when requested.
    pub snapshots: Vec<ParticleEnsemble>,
    pub warnings: Vec<String>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn particle_rng(seed: u64, index: usize, steps: u64) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(splitmix(seed ^ splitmix(index as u64 ^ splitmix(steps))))
}

fn chunked_sum(x: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = x.par_chunks(CHUNK).map(|c| c.iter().map(|v| f(*v)).sum()).collect();
    partial.iter().sum()
}

struct Stats {
    mean: f64,
    variance: f64,
    mean_se: f64,
    variance_se: f64,
}

fn stats(x: &[f64]) -> Stats {
    let n = x.len() as f64;
    let mean = chunked_sum(x, |v| v) / n;
    let variance = chunked_sum(x, |v| (v - mean).powi(2)) / n;
    let m4 = chunked_sum(x, |v| (v - mean).powi(4)) / n;
    Stats {
        mean,
        variance,
        mean_se: (variance / n).sqrt(),
        variance_se: ((m4 - variance * variance).max(0.0) / n).sqrt(),
    }
}

/// Interacting-particle simulation of the kinetic equation.
///
/// Each step of length `h` moves every forecast by the explicit Euler drift
/// `alpha (s - x) h`, with `s` the current ensemble mean, and then lets it
/// interact with probability `1 - e^{-beta h}`, jumping to
/// `(1 - q) x + q X(1 + delta)` with `X` taken at the middle of the step.
/// Results are bit-identical for a given seed whatever the thread count.
pub fn particle_simulate(
    params: &KineticParams,
    forcing: &ForcingPath,
    ensemble: &ParticleEnsemble,
    config: &ParticleConfig,
) -> Result<ParticleRun> {
    params.validate()?;
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(Error::InvalidTimeStep(format!("dt = {}", config.dt)));
    }
    let times = &config.record_times;
    if times.iter().any(|t| !t.is_finite())
        || times.first().is_some_and(|t| *t < ensemble.time)
        || times.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::InvalidTimeStep(
            "record times must be increasing and not before the ensemble time".into(),
        ));
    }
    if let Some(last) = times.last() {
        forcing.check_covers(*last)?;
    }

    let mut warnings = Vec::new();
    let mut state = ensemble.clone();
    let n = state.len();
    let mut rngs: Vec<Pcg64Mcg> = (0..n).map(|i| particle_rng(config.seed, i, state.steps)).collect();
    let mut run = ParticleRun {
        times: Vec::with_capacity(times.len()),
        mean: Vec::with_capacity(times.len()),
        variance: Vec::with_capacity(times.len()),
        mean_se: Vec::with_capacity(times.len()),
        variance_se: Vec::with_capacity(times.len()),
        final_ensemble: ensemble.clone(),
        snapshots: Vec::new(),
        warnings: Vec::new(),
    };

    for &t_rec in times {
        let span = t_rec - state.time;
        let n_steps = if span > 0.0 {
            ((span / config.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
        } else {
            0
        };
        if n_steps > 0 {
            let h = span / n_steps as f64;
            if params.alpha * h > 1.0 {
                return Err(Error::InvalidTimeStep(format!(
                    "alpha * dt = {} exceeds 1",
                    params.alpha * h
                )));
            }
            if params.beta * h > 0.1 && warnings.is_empty() {
                warnings.push(format!("beta * dt = {:.3} is not small; jump timing is coarse", params.beta * h));
            }
            let drift = params.alpha * h;
            let p_jump = -(-params.beta * h).exp_m1();
            let t0 = state.time;
            for step in 0..n_steps {
                let t = t0 + step as f64 * h;
                let s = chunked_sum(&state.positions, |v| v) / n as f64;
                let index_level = forcing.value_at(t + 0.5 * h);
                state
                    .positions
                    .par_chunks_mut(CHUNK)
                    .zip(rngs.par_chunks_mut(CHUNK))
                    .for_each(|(xs, rs)| {
                        for (x, rng) in xs.iter_mut().zip(rs) {
                            *x += drift * (s - *x);
                            if rng.random::<f64>() < p_jump {
                                *x = post_interaction(*x, index_level, params);
                            }
                        }
                    });
            }
            state.steps += n_steps as u64;
        }
        state.time = t_rec;
        let st = stats(&state.positions);
        run.times.push(t_rec);
        run.mean.push(st.mean);
        run.variance.push(st.variance);
        run.mean_se.push(st.mean_se);
        run.variance_se.push(st.variance_se);
        if config.keep_snapshots {
            run.snapshots.push(state.clone());
        }
    }
    run.final_ensemble = state;
    run.warnings = warnings;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::uniform_grid;

    #[test]
    fn fixed_point_ensemble_is_invariant() {
        let p = KineticParams::new(0.28, 6.05, 0.143, 0.5).unwrap();
        let x = 2000.0;
        let target = p.target(x);
        let ens = ParticleEnsemble::new(vec![target; 1000]).unwrap();
        let f = ForcingPath::constant(x, 1.0).unwrap();
        let run = particle_simulate(&p, &f, &ens, &ParticleConfig::new(uniform_grid(1.0, 10), 3)).unwrap();
        for (m, v) in run.mean.iter().zip(&run.variance) {
            assert!((m - target).abs() < 1e-9 * target);
            assert!(*v < 1e-12 * target * target);
        }
    }

    #[test]
    fn empty_and_bad_step() {
        assert!(matches!(ParticleEnsemble::new(vec![]), Err(Error::EmptyEnsemble)));
        let p = KineticParams::reference();
        let f = ForcingPath::constant(1.0, 1.0).unwrap();
        let ens = ParticleEnsemble::new(vec![1.0; 4]).unwrap();
        let mut cfg = ParticleConfig::new(vec![1.0], 0);
        cfg.dt = 0.0;
        assert!(matches!(particle_simulate(&p, &f, &ens, &cfg), Err(Error::InvalidTimeStep(_))));
    }

    #[test]
    fn coarse_step_warns() {
        let p = KineticParams::reference();
        let f = ForcingPath::constant(1.0, 1.0).unwrap();
        let ens = ParticleEnsemble::new(vec![1.0; 4]).unwrap();
        let mut cfg = ParticleConfig::new(vec![1.0], 0);
        cfg.dt = 0.05;
        let run = particle_simulate(&p, &f, &ens, &cfg).unwrap();
        assert_eq!(run.warnings.len(), 1);
    }

    #[test]
    fn deterministic_and_nonnegative() {
        let p = KineticParams::new(0.4, 3.0, 0.1, 1.5).unwrap();
        let f = ForcingPath::new(vec![100.0, 80.0, 120.0, 90.0], 0.1, Default::default()).unwrap();
        let ens = ParticleEnsemble::lognormal(5000, 100.0, 0.5, 1).unwrap();
        let cfg = ParticleConfig::new(uniform_grid(0.3, 6), 9);
        let a = particle_simulate(&p, &f, &ens, &cfg).unwrap();
        let b = particle_simulate(&p, &f, &ens, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_ensemble.positions().iter().all(|x| *x >= 0.0));
        assert_eq!(a.final_ensemble.len(), 5000);
    }
}
