//! Discrete Allen–Cahn minimisers on Cayley graphs of hyperbolic groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: group backends, finite Cayley balls, site subsets, geodesics.
//! * [`boundary`]: boundary points, cylinder sets, the visual metric, cones,
//!   Patterson–Sullivan weights and the derived geometric constants.
//! * [`ac`]: potentials, fields, Dirichlet solvers and the anti-continuum
//!   continuation.
//! * [`dirichlet`]: truncated Dirichlet problems with prescribed phases at
//!   the boundary, transition-set audits and the main-lemma cascade.
//! * [`plateau`]: the small-coupling limit as a minimal cut, with exhaustive
//!   and max-flow certification on finite windows.
//! * [`runner`]: configuration, end-to-end pipeline and on-disk artifacts.

pub mod ac;
pub mod boundary;
pub mod digest;
pub mod dirichlet;
pub mod exec;
pub mod flow;
pub mod group;
pub mod phases;
pub mod plateau;
pub mod runner;

pub use exec::Execution;
