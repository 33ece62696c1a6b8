//! The full opinion density `f(t, x)`: an interacting-particle simulation of
//! the jump-drift process and a Neumann-series solver of the integral form
//! of the kinetic equation.

mod grid;
mod io;
mod moments;
mod neumann;
mod particles;

pub use grid::{transported_initial, GridDistribution, DEFAULT_GRID_POINTS};
pub use io::{write_ensemble_csv, write_grid_csv, Sidecar};
pub use moments::{moments_of, HasMoments, Moments};
pub use neumann::{neumann_norm_bound, neumann_solve, NeumannConfig, NeumannSolution};
pub use particles::{particle_simulate, ParticleConfig, ParticleEnsemble, ParticleRun, DEFAULT_PARTICLE_DT};
