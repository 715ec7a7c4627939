//! The discrete Allen–Cahn equation `ρ Δx - V'(x) = 0` on a Cayley ball: the
//! potential, the action, Dirichlet solvers, anti-continuum continuation and
//! executable forms of the ordering lemmas.

mod continuation;
mod field;
mod lemmas;
mod potential;
mod solver;

pub use continuation::{
    continue_from, continue_from_seed, contraction_ratio, quasi_newton_step, ContinuationConfig,
    ContinuationReport,
};
pub use field::{
    action, action_on_window, laplacian, residual, sup_distance, ScalarField,
};
pub use lemmas::{classify_phases, comparison_check, minmax_check, Ordering};
pub use potential::{DoubleWell, Potential};
pub use solver::{frozen_outside_ball, solve_dirichlet, SolveReport, SolverConfig, SweepMode};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcError {
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("coupling rho must be finite and nonnegative, got {0}")]
    BadRho(f64),
    #[error("non-finite value at site {site}")]
    NonFinite { site: usize },
    #[error("site {site} has a neighbour outside the ball")]
    ExternalNeighbor { site: usize },
    #[error("boundary value {value} at site {site} lies outside [c0, c1]")]
    BoundaryOutOfRange { site: usize, value: f64 },
    #[error("no convergence after {iterations} sweeps, last residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
        last: Vec<f64>,
    },
    #[error("seed value {value} at site {site} is not a nondegenerate critical point")]
    NonMorseSeed { site: usize, value: f64 },
    #[error("rho = {rho} exceeds rho0 = {rho0}")]
    RhoTooLarge { rho: f64, rho0: f64 },
    #[error("start is {distance} from the seed, outside the sigma0 = {sigma0} ball")]
    OutsideSigmaBall { distance: f64, sigma0: f64 },
    #[error("boundary data not ordered at site {site}")]
    UnorderedBoundary { site: usize },
    #[error("invalid continuation config: {0}")]
    BadConfig(String),
}
