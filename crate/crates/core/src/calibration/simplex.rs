use super::{CalibrationProblem, CalibrationResult, Point, DEFAULT_Q_FIXED};
use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.05;

type Vertex = ([f64; 2], f64);

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn project(u: [f64; 2]) -> [f64; 2] {
    [u[0].clamp(0.0, 1.0), u[1].clamp(0.0, 1.0)]
}

fn diameter(simplex: &[Vertex; 3]) -> f64 {
    let best = simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(u, _)| ((u[0] - best[0]).powi(2) + (u[1] - best[1]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// Nelder-Mead simplex descent on `(k, delta)`, run in the unit square of
/// [`super::Bounds`] (log scale for `k`); trial points outside the box are
/// projected back onto it.
///
/// Stops when every vertex is within `tol` of the best one (unit-square
/// distance) or after `max_iter` iterations, in which case the best point is
/// returned with `converged = false`. `q` is set to the default split.
pub fn local_refine(problem: &CalibrationProblem, start: Point, tol: f64, max_iter: usize) -> Result<CalibrationResult> {
    let bounds = problem.bounds;
    if !bounds.contains(start) {
        return Err(Error::InvalidParameter(format!(
            "start (k = {}, delta = {}) lies outside the bounds",
            start.k, start.delta
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let mut evals = 0usize;
    let mut eval = |u: [f64; 2]| -> Result<Vertex> {
        evals += 1;
        let u = project(u);
        Ok((u, problem.objective_at(bounds.from_unit(u))?))
    };

    let u0 = bounds.to_unit(start);
    let step = |x: f64| if x + INITIAL_STEP <= 1.0 { x + INITIAL_STEP } else { x - INITIAL_STEP };
    let mut simplex = [eval(u0)?, eval([step(u0[0]), u0[1]])?, eval([u0[0], step(u0[1])])?];
    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < tol {
            converged = true;
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = eval(lerp(centroid, worst.0, -REFLECT))?;
        if reflected.1 < simplex[0].1 {
            let expanded = eval(lerp(centroid, worst.0, -EXPAND))?;
            simplex[2] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[1].1 {
            simplex[2] = reflected;
        } else {
            let contracted = if reflected.1 < worst.1 {
                eval(lerp(centroid, reflected.0, CONTRACT))?
            } else {
                eval(lerp(centroid, worst.0, CONTRACT))?
            };
            if contracted.1 < worst.1.min(reflected.1) {
                simplex[2] = contracted;
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    *v = eval(lerp(best, v.0, SHRINK))?;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    if !converged && diameter(&simplex) < tol {
        converged = true;
    }
    let (u, value) = simplex[0];
    CalibrationResult::from_point(bounds.from_unit(u), value, DEFAULT_Q_FIXED, evals, converged)
}

#[cfg(test)]
mod tests {
    use super::super::tests::noiseless_problem;
    use super::*;

    #[test]
    fn stays_at_truth() {
        let (problem, truth) = noiseless_problem(400, 3);
        let start = Point { k: truth.k(), delta: truth.delta };
        let r = local_refine(&problem, start, 1e-10, 500).unwrap();
        assert!(r.objective <= problem.objective_at(start).unwrap());
        assert!((r.k / truth.k() - 1.0).abs() < 1e-6);
        assert!((r.params.delta - truth.delta).abs() < 1e-6);
    }

    #[test]
    fn recovers_from_offset_start() {
        let (problem, truth) = noiseless_problem(1000, 4);
        for start in [Point { k: 2.0 * truth.k(), delta: 0.25 }, Point { k: 0.6 * truth.k(), delta: 0.08 }] {
            let r = local_refine(&problem, start, 1e-10, 2000).unwrap();
            assert!(r.converged);
            assert!((r.k / truth.k() - 1.0).abs() < 1e-3, "k {}", r.k);
            assert!((r.params.delta / truth.delta - 1.0).abs() < 1e-3, "delta {}", r.params.delta);
        }
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let (problem, _) = noiseless_problem(200, 5);
        let r = local_refine(&problem, Point { k: 10.0, delta: 0.9 }, 1e-12, 3).unwrap();
        assert!(!r.converged);
        assert!(r.objective <= problem.objective_at(Point { k: 10.0, delta: 0.9 }).unwrap());
        assert!(local_refine(&problem, Point { k: 50.0, delta: 0.0 }, 1e-8, 10).is_err());
    }
}
