//! Stationary objects: radial Dirichlet solutions, ball evolutions, the
//! truncated energy and its minimizers, travelling-front profiles.

pub mod energy;
pub mod front;
pub mod radial;

use thiserror::Error;

pub use energy::{energy, energy_threshold, minimize_energy, Basin, DescentOptions, EnergyProblem, EnergyReport};
pub use front::{front_profile_1d, front_profile_generic, minorant_front, paraboloid_eta, FrontOptions, FrontProfile, ParaboloidSubsolution, ResidualReport};
pub use radial::{embed_radial, evolve_ball_dirichlet, find_min_r, solve_radial_dirichlet, subsolution_defect, BallEvolution, RadialSolution};

use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum StationaryError {
    #[error("no positive Dirichlet solution on a ball of radius {radius}")]
    NoPositiveSolution { radius: f64 },
    #[error("no front: speed bracket ±{bound} does not separate overshoot from undershoot")]
    NoFront { bound: f64 },
    #[error("not converged after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },
    #[error("subsolution residual {worst:e} > 0 at {at:?}")]
    ResidualPositive { worst: f64, at: [f64; 2] },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
