//! Dirichlet problems at infinity: cone-seeded solves on growing balls, the
//! transition set and its audits, the main-lemma constants and the decay of
//! the solution towards the prescribed phases.

mod audits;
mod constants;
mod real;
mod transition;

pub use audits::{
    asymptotic_value_audit, cascade_audit, default_probe, CascadeReport, CascadeRow,
    CascadeStatus, DecayReport, DecayRow,
};
pub use constants::{
    compute_constants, precision_check, r_i_hp, ConstantsInput, MainLemmaConstants, PrecisionCheck,
    TABULATED,
};
pub use real::{Hp, Real, HP_BITS};
pub use transition::{
    connected_components_audit, extract_transition_set, phase_regions, quasi_minimality_audit,
    ComponentsAudit, QuasiMinimality, TransitionSet,
};

use crate::ac::{
    continue_from, solve_dirichlet, sup_distance, AcError, ContinuationConfig, DoubleWell,
    Potential, ScalarField, SolverConfig,
};
use crate::boundary::{cone, in_cone, BoundarySet, BoundarySpec, CylinderUnion};
use crate::exec::{self, Execution};
use crate::flow::FlowNetwork;
use crate::group::{inner_set, CayleyBall, Gen, GroupError, GroupSpec, SubsetHandle, EXTERNAL};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("radius list must be nonempty, strictly increasing and start at 1 or more")]
    BadRadii,
    #[error("dimension D = {0} must exceed 1/4")]
    DimensionTooSmall(f64),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("N = {n}: {source}")]
    Solve { n: usize, source: AcError },
    #[error(transparent)]
    Ac(#[from] AcError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A phase split of the boundary, a coupling and the list of ball radii on
/// which the Dirichlet problem is solved.
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub group: GroupSpec,
    pub boundary: BoundarySpec,
    pub potential: DoubleWell,
    pub rho: f64,
    pub radii: Vec<usize>,
    pub config: ContinuationConfig,
    pub solver: SolverConfig,
}

impl DirichletProblem {
    pub fn new(
        group: GroupSpec,
        boundary: BoundarySpec,
        potential: DoubleWell,
        rho: f64,
        radii: Vec<usize>,
        config: ContinuationConfig,
        solver: SolverConfig,
    ) -> Result<Self, DirichletError> {
        if radii.is_empty() || radii[0] == 0 || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DirichletError::BadRadii);
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(AcError::BadRho(rho).into());
        }
        Ok(Self {
            group,
            boundary,
            potential,
            rho,
            radii,
            config,
            solver,
        })
    }

    /// The same problem at another coupling.
    pub fn with_rho(&self, rho: f64) -> Self {
        Self {
            rho,
            ..self.clone()
        }
    }

    pub fn max_radius(&self) -> usize {
        *self.radii.last().unwrap()
    }
}

/// `c0` on the inner set of `cone(D0)` and `c1` elsewhere, at `ρ = 0` and
/// frozen everywhere.
pub fn anti_continuum_seed(
    ball: &CayleyBall,
    d0: &BoundarySet,
    r: usize,
    pot: &dyn Potential,
) -> ScalarField {
    let (c0, c1) = pot.wells();
    let inner = inner_set(ball, &cone(ball, d0, r)).unwrap();
    let values = (0..ball.len())
        .map(|g| if inner.contains(g) { c0 } else { c1 })
        .collect();
    ScalarField {
        values,
        rho: 0.0,
        frozen: SubsetHandle::full(ball.len()),
    }
}

/// [`anti_continuum_seed`] for the inner set taken in the whole group: a rim
/// site is inner when its extensions past the rim also lie in the cone.
pub fn anti_continuum_seed_exact(
    ball: &CayleyBall,
    d0: &CylinderUnion,
    r: usize,
    pot: &dyn Potential,
) -> ScalarField {
    let (c0, c1) = pot.wells();
    let in_c = cone(ball, &BoundarySet::Cylinders(d0.clone()), r);
    let values = (0..ball.len())
        .map(|g| {
            let inner = in_c.contains(g)
                && ball.neighbor_row(g).iter().enumerate().all(|(s, &h)| {
                    if h == EXTERNAL {
                        let mut w = ball.word(g);
                        w.push(s as Gen);
                        in_cone(d0, &w, r)
                    } else {
                        in_c.contains(h as usize)
                    }
                });
            if inner {
                c0
            } else {
                c1
            }
        })
        .collect();
    ScalarField {
        values,
        rho: 0.0,
        frozen: SubsetHandle::full(ball.len()),
    }
}

/// Relabels the free sites by a minimum edge cut between the frozen `c0`
/// and `c1` sites, taking the smallest `c0` side among all minimum cuts.
/// Frozen values must be wells; every free site must be internal. Returns
/// the new values and the number of free sites whose label changed.
pub fn minimal_labeling(
    ball: &CayleyBall,
    seed: &[f64],
    free: &SubsetHandle,
    pot: &dyn Potential,
) -> Result<(Vec<f64>, usize), DirichletError> {
    let (c0, c1) = pot.wells();
    let sites: Vec<usize> = free.iter().collect();
    let mut index = vec![usize::MAX; ball.len()];
    for (i, &g) in sites.iter().enumerate() {
        index[g] = i;
    }
    let (s, t) = (sites.len(), sites.len() + 1);
    let mut net = FlowNetwork::new(sites.len() + 2);
    for (i, &g) in sites.iter().enumerate() {
        if ball.is_rim(g) {
            return Err(AcError::ExternalNeighbor { site: g }.into());
        }
        for &h in ball.neighbor_row(g) {
            let h = h as usize;
            if free.contains(h) {
                if g < h {
                    net.add_edge(i, index[h], 1);
                }
            } else if seed[h] == c0 {
                net.add_edge(s, i, 1);
            } else if seed[h] == c1 {
                net.add_edge(i, t, 1);
            } else {
                return Err(DirichletError::BadInput(format!(
                    "frozen value {} at site {h} is not a well",
                    seed[h]
                )));
            }
        }
    }
    net.max_flow(s, t);
    let side = net.source_side(s);
    let mut out = seed.to_vec();
    let mut changed = 0;
    for (i, &g) in sites.iter().enumerate() {
        let v = if side[i] { c0 } else { c1 };
        if v != seed[g] {
            changed += 1;
        }
        out[g] = v;
    }
    Ok((out, changed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveMethod {
    Continuation {
        iterations: usize,
        envelope_holds: bool,
        contraction_holds: bool,
    },
    CoordinateDescent {
        sweeps: usize,
        local_minimum: bool,
    },
}

/// `x^N` on `B_{N+1}`; the free sites are `B_{N-1}`.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub n: usize,
    pub ball: CayleyBall,
    pub field: ScalarField,
    /// The critical-point configuration the solve started from.
    pub seed: Vec<f64>,
    /// Free sites whose well changed in the min-cut relabelling.
    pub relabelled: usize,
    pub method: SolveMethod,
    pub residual: f64,
    pub distance_to_seed: f64,
}

/// Sup-differences of consecutive solutions on a fixed ball `B_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub m: usize,
    /// `(N_prev, N, sup_{B_m} |x^N - x^{N_prev}|)`.
    pub diffs: Vec<(usize, usize, f64)>,
}

impl MonitorRow {
    /// Last difference below `tol` and the sequence non-increasing from
    /// some index on; returns that index.
    pub fn stabilized(&self, tol: f64) -> Option<usize> {
        let last = self.diffs.last()?.2;
        if last >= tol {
            return None;
        }
        let mut start = self.diffs.len() - 1;
        while start > 0 && self.diffs[start - 1].2 >= self.diffs[start].2 {
            start -= 1;
        }
        Some(start)
    }
}

#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub solutions: Vec<DirichletSolution>,
    pub monitor: Vec<MonitorRow>,
}

impl SequenceReport {
    pub fn last(&self) -> &DirichletSolution {
        self.solutions.last().unwrap()
    }
}

/// Solves the Dirichlet problem on `B_N` for one `N`.
pub fn solve_one(problem: &DirichletProblem, n: usize) -> Result<DirichletSolution, DirichletError> {
    let wrap = |source: AcError| DirichletError::Solve { n, source };
    let pot = &problem.potential;
    let ball = CayleyBall::build(&problem.group, n + 1)?;
    let rs = problem.group.shadow_radius();
    let cone_seed = anti_continuum_seed_exact(&ball, &problem.boundary.d0, rs, pot).values;
    let free = SubsetHandle::ball(&ball, n - 1);
    let (seed, relabelled) = minimal_labeling(&ball, &cone_seed, &free, pot)?;
    let frozen = free.complement();
    let rho = problem.rho;
    let (values, method, residual) = if rho <= problem.config.rho0 {
        let rep = continue_from(&ball, pot, &seed, &seed, rho, &free, &problem.config)
            .map_err(wrap)?;
        let method = SolveMethod::Continuation {
            iterations: rep.iterations,
            envelope_holds: rep.envelope_holds,
            contraction_holds: rep.contraction_holds,
        };
        (rep.values, method, rep.residual)
    } else {
        let start = ScalarField::new(&ball, seed.clone(), rho, frozen.clone()).map_err(wrap)?;
        let rep = solve_dirichlet(&ball, pot, &start, &problem.solver).map_err(wrap)?;
        let method = SolveMethod::CoordinateDescent {
            sweeps: rep.sweeps,
            local_minimum: rep.is_local_minimum(),
        };
        (rep.field.values, method, rep.residual)
    };
    let field = ScalarField::new(&ball, values, rho, frozen).map_err(wrap)?;
    Ok(DirichletSolution {
        n,
        distance_to_seed: sup_distance(&field.values, &seed),
        ball,
        field,
        seed,
        relabelled,
        method,
        residual,
    })
}

/// Solves for every radius in the problem and monitors the differences of
/// consecutive solutions on `B_m` for `m <= N_min`.
pub fn solve_sequence(problem: &DirichletProblem) -> Result<SequenceReport, DirichletError> {
    let exec = problem.config.exec;
    let solutions = exec::map_slice(exec, &problem.radii, |&n| solve_one(problem, n))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let monitor = monitor_rows(&solutions, problem.radii[0]);
    Ok(SequenceReport { solutions, monitor })
}

fn monitor_rows(solutions: &[DirichletSolution], max_m: usize) -> Vec<MonitorRow> {
    (0..=max_m)
        .map(|m| {
            let diffs = solutions
                .windows(2)
                .map(|w| {
                    let k = w[0].ball.ball_size(m);
                    let d = sup_distance(&w[0].field.values[..k], &w[1].field.values[..k]);
                    (w[0].n, w[1].n, d)
                })
                .collect();
            MonitorRow { m, diffs }
        })
        .collect()
}

/// Solves at every coupling of a ladder on the ball of the largest radius.
pub fn solve_ladder(
    problem: &DirichletProblem,
    ladder: &[f64],
    exec: Execution,
) -> Result<Vec<DirichletSolution>, DirichletError> {
    let n = problem.max_radius();
    exec::map_slice(exec, ladder, |&rho| solve_one(&problem.with_rho(rho), n))
        .into_iter()
        .collect()
}
