use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{local_refine, objective, CalibrationProblem, CalibrationResult, Candidate, DEFAULT_Q_FIXED};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub budget: usize,
    pub n_refine: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub q_fixed: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            budget: 500,
            n_refine: 5,
            tol: 1e-10,
            max_iter: 2000,
            seed: 0,
            q_fixed: DEFAULT_Q_FIXED,
        }
    }
}

/// Latin-hypercube sample of `budget` points in the `(k, delta)` box (log
/// scale for `k`), ranked by ascending objective. Ties keep sample order.
pub fn global_search(problem: &CalibrationProblem, budget: usize, seed: u64) -> Result<Vec<Candidate>> {
    if budget == 0 {
        return Err(Error::InvalidBudget(budget));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strata: [Vec<usize>; 2] = [(0..budget).collect(), (0..budget).collect()];
    for s in &mut strata {
        s.shuffle(&mut rng);
    }
    let units: Vec<[f64; 2]> = (0..budget)
        .map(|i| {
            let a = (strata[0][i] as f64 + rng.random::<f64>()) / budget as f64;
            let b = (strata[1][i] as f64 + rng.random::<f64>()) / budget as f64;
            [a, b]
        })
        .collect();
    let mut candidates = units
        .par_iter()
        .map(|u| {
            let point = problem.bounds.from_unit(*u);
            problem.objective_at(point).map(|objective| Candidate { point, objective })
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| a.objective.total_cmp(&b.objective));
    Ok(candidates)
}

/// Global search followed by simplex refinement of the best `n_refine`
/// candidates; returns the best refined point with `q = q_fixed`.
pub fn calibrate(problem: &CalibrationProblem, config: &CalibrationConfig) -> Result<CalibrationResult> {
    if !(config.q_fixed > 0.0 && config.q_fixed < 1.0) {
        return Err(Error::InvalidParameter(format!("q_fixed must lie in (0, 1), got {}", config.q_fixed)));
    }
    if config.n_refine == 0 {
        return Err(Error::InvalidParameter("n_refine must be at least 1".into()));
    }
    let candidates = global_search(problem, config.budget, config.seed)?;
    let top = config.n_refine.min(candidates.len());
    let refined = candidates[..top]
        .par_iter()
        .map(|c| local_refine(problem, c.point, config.tol, config.max_iter))
        .collect::<Result<Vec<_>>>()?;
    let evaluations = config.budget + refined.iter().map(|r| r.n_evaluations).sum::<usize>();
    let best = refined
        .into_iter()
        .reduce(|a, b| if b.objective < a.objective { b } else { a })
        .expect("at least one candidate");
    let mut result = CalibrationResult::from_point(best.point(), best.objective, config.q_fixed, evaluations, best.converged)?;
    result.objective = objective(&result.params, problem)?;
    result.restarts_used = top;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::super::tests::noiseless_problem;
    use super::*;
    use crate::timeseries::synth_sentiment;

    #[test]
    fn budget_checks_and_ordering() {
        let (problem, _) = noiseless_problem(200, 6);
        assert!(matches!(global_search(&problem, 0, 1), Err(Error::InvalidBudget(0))));
        let cands = global_search(&problem, 40, 1).unwrap();
        assert_eq!(cands.len(), 40);
        assert!(cands.windows(2).all(|w| w[0].objective <= w[1].objective));
        assert!(cands[0].objective <= cands[20].objective);
        assert_eq!(cands, global_search(&problem, 40, 1).unwrap());
        assert!(cands.iter().all(|c| problem.bounds.contains(c.point)));
    }

    #[test]
    fn single_sample_truth_ranks_first() {
        let (problem, _) = noiseless_problem(200, 6);
        let only = global_search(&problem, 1, 9).unwrap()[0];
        let truth = only.point.params(0.28).unwrap();
        let s = synth_sentiment(&truth, problem.index(), problem.dt(), problem.s0(), 0.0, 0).unwrap();
        let p2 = CalibrationProblem::new(problem.index(), &s, problem.s0(), problem.dt()).unwrap();
        let first = global_search(&p2, 1, 9).unwrap()[0];
        assert_eq!(first.point, only.point);
        assert!(first.objective < 1e-6);
    }

    #[test]
    fn round_trip_and_ridge_honesty() {
        let (problem, truth) = noiseless_problem(600, 7);
        let config = CalibrationConfig { budget: 100, ..Default::default() };
        let r = calibrate(&problem, &config).unwrap();
        assert!((r.k - r.params.q * r.params.beta).abs() < 1e-12 * r.k);
        assert_eq!(r.objective, objective(&r.params, &problem).unwrap());
        let again = synth_sentiment(&r.params, problem.index(), problem.dt(), problem.s0(), 0.0, 0).unwrap();
        let gap = again
            .values()
            .iter()
            .zip(problem.measured().values())
            .map(|(a, b)| (a / b - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-6, "gap {gap}");
        assert!((r.k / truth.k() - 1.0).abs() < 1e-3);

        let other = calibrate(&problem, &CalibrationConfig { q_fixed: 0.5, ..config }).unwrap();
        assert_eq!(other.k, r.k);
        assert_eq!(other.params.delta, r.params.delta);
        assert_eq!(other.params.q, 0.5);
        assert!((other.objective - r.objective).abs() <= 1e-10 * r.objective.max(1.0));
    }
}
