//! Dirichlet solves along a decreasing coupling ladder and the stabilised
//! limit partition.

use super::{PlateauError, PlateauPartition};
use crate::ac::{ContinuationConfig, Potential};
use crate::dirichlet::{solve_ladder, DirichletProblem, DirichletSolution};
use crate::exec::Execution;
use crate::phases::PhasePartition;
use serde::{Deserialize, Serialize};

/// `ρ_n = ρ1 · factor^{-n}` for `n = 1..=depth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub factor: f64,
    pub depth: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            factor: 4.0,
            depth: 4,
        }
    }
}

pub fn default_ladder(rho1: f64, cfg: &LadderConfig) -> Vec<f64> {
    (1..=cfg.depth)
        .map(|n| rho1 * cfg.factor.powi(-(n as i32)))
        .collect()
}

/// `Ĉe^{hn} / (Ĉe^{hn} + 1) < (1 - 2σ_n/(c1-c0))²` at rung `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition1 {
    pub rung: usize,
    pub sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn condition1(rung: usize, sigma: f64, width: f64, c_hat: f64, entropy: f64) -> Condition1 {
    let a = c_hat * (entropy * rung as f64).exp();
    let lhs = a / (a + 1.0);
    let rhs = (1.0 - 2.0 * sigma / width).max(0.0).powi(2);
    Condition1 {
        rung,
        sigma,
        lhs,
        rhs,
        holds: lhs < rhs,
    }
}

fn check_ladder(ladder: &[f64]) -> Result<(), PlateauError> {
    let ok = !ladder.is_empty()
        && ladder.iter().all(|&r| r > 0.0 && r.is_finite())
        && ladder.windows(2).all(|w| w[1] < w[0]);
    if ok {
        Ok(())
    } else {
        Err(PlateauError::BadLadder)
    }
}

/// The separation inequality at every rung with the a-priori radius
/// `σ_n = sigma_bound(ρ_n)`; usable before any solve.
pub fn ladder_admissible(
    ladder: &[f64],
    config: &ContinuationConfig,
    num_generators: usize,
    pot: &dyn Potential,
    c_hat: f64,
    entropy: f64,
) -> Result<Vec<Condition1>, PlateauError> {
    check_ladder(ladder)?;
    let (c0, c1) = pot.wells();
    let rows: Vec<Condition1> = ladder
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let s = config.sigma_bound(rho, num_generators, c1 - c0);
            condition1(i + 1, s, c1 - c0, c_hat, entropy)
        })
        .collect();
    match rows.iter().find(|c| !c.holds) {
        Some(c) => Err(PlateauError::Condition1 {
            rung: c.rung,
            lhs: c.lhs,
            rhs: c.rhs,
        }),
        None => Ok(rows),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub rho: f64,
    /// `‖x^ρ - x‖∞` for the two-valued labelling `x`.
    pub sigma_measured: f64,
    pub sigma_bound: f64,
    pub condition: Condition1,
    pub d0_count: usize,
    pub cut_edges: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rungs: Vec<Rung>,
    pub solutions: Vec<DirichletSolution>,
    pub partitions: Vec<PlateauPartition>,
    /// `(m, i)`: rungs `i..` all agree with the last one on `B_m`.
    pub stable_from: Vec<(usize, usize)>,
    pub stabilize_radius: usize,
}

impl SweepReport {
    pub fn limit(&self) -> &PlateauPartition {
        self.partitions.last().unwrap()
    }

    /// Once a rung agrees with the limit on `B_m`, so does every later one.
    pub fn monotone(&self) -> bool {
        let last = self.limit();
        self.stable_from.iter().all(|&(m, i)| {
            let k = last.ball.ball_size(m);
            self.partitions[i..]
                .iter()
                .all(|p| (0..k).all(|g| p.d0.contains(g) == last.d0.contains(g)))
        })
    }
}

/// Solves along `ladder`, checks the separation inequality with the measured
/// `σ_n`, and returns the partitions once the last two rungs agree on
/// `B_stabilize_radius`.
pub fn rho_sweep(
    problem: &DirichletProblem,
    ladder: &[f64],
    c_hat: f64,
    entropy: f64,
    stabilize_radius: usize,
    exec: Execution,
) -> Result<SweepReport, PlateauError> {
    check_ladder(ladder)?;
    let pot = &problem.potential;
    let (c0, c1) = pot.wells();
    let width = c1 - c0;
    let ns = problem.group.num_generators();
    let sigma0 = problem.config.sigma0;
    let solutions = solve_ladder(problem, ladder, exec)?;
    let mut rungs = Vec::new();
    let mut partitions = Vec::new();
    for (i, sol) in solutions.iter().enumerate() {
        let p = PhasePartition::classify(&sol.field.values, c0, c1, sigma0);
        if !p.is_clean() {
            return Err(PlateauError::MiddleBand {
                rung: i + 1,
                count: p.middle_band.len(),
            });
        }
        let condition = condition1(i + 1, sol.distance_to_seed, width, c_hat, entropy);
        if !condition.holds {
            return Err(PlateauError::Condition1 {
                rung: i + 1,
                lhs: condition.lhs,
                rhs: condition.rhs,
            });
        }
        let mut part = PlateauPartition::from_phases(sol.ball.clone(), &p)?;
        part.ladder = ladder.to_vec();
        rungs.push(Rung {
            rho: ladder[i],
            sigma_measured: sol.distance_to_seed,
            sigma_bound: problem.config.sigma_bound(ladder[i], ns, width),
            condition,
            d0_count: part.d0.count(),
            cut_edges: part.cut_edges().len(),
        });
        partitions.push(part);
    }
    let last = partitions.last().unwrap();
    let m = stabilize_radius.min(last.ball.radius());
    if partitions.len() >= 2 {
        let prev = &partitions[partitions.len() - 2];
        let sites: Vec<String> = (0..last.ball.ball_size(m))
            .filter(|&g| prev.d0.contains(g) != last.d0.contains(g))
            .map(|g| last.ball.word_string(g))
            .collect();
        if !sites.is_empty() {
            return Err(PlateauError::NotStabilized { m, sites });
        }
    }
    let stable_from = (0..=m)
        .map(|m| {
            let k = last.ball.ball_size(m);
            let agrees = |p: &PlateauPartition| (0..k).all(|g| p.d0.contains(g) == last.d0.contains(g));
            let mut i = partitions.len() - 1;
            while i > 0 && agrees(&partitions[i - 1]) {
                i -= 1;
            }
            (m, i)
        })
        .collect();
    Ok(SweepReport {
        rungs,
        solutions,
        partitions,
        stable_from,
        stabilize_radius: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{ConstantsReport, VisualMetricParams};
    use crate::dirichlet::tests::f2_problem;

    fn c_hat_f2() -> (f64, f64) {
        let g = crate::group::GroupSpec::free(2).unwrap();
        let m = VisualMetricParams::default_for(&g);
        let rep = ConstantsReport::build(&g, &m, &Default::default()).unwrap();
        (4.0 * rep.c_tilde.value, rep.entropy)
    }

    #[test]
    fn quartic_ladders() {
        let p = f2_problem(&["a"], 1.0, vec![4]);
        let (c_hat, h) = c_hat_f2();
        assert_eq!(c_hat, 8.0);
        let rho1 = p.config.rho1;
        let quarter = default_ladder(rho1, &LadderConfig::default());
        let rows = ladder_admissible(&quarter, &p.config, 4, &p.potential, c_hat, h).unwrap();
        assert_eq!(rows.len(), 4);
        let halving = default_ladder(rho1, &LadderConfig { factor: 2.0, depth: 4 });
        match ladder_admissible(&halving, &p.config, 4, &p.potential, c_hat, h) {
            Err(PlateauError::Condition1 { rung: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(
            ladder_admissible(&[0.001, 0.002], &p.config, 4, &p.potential, c_hat, h),
            Err(PlateauError::BadLadder)
        );
    }

    #[test]
    fn cylinder_sweep_stabilizes() {
        let p = f2_problem(&["a"], 1.0, vec![5]);
        let (c_hat, h) = c_hat_f2();
        let ladder = default_ladder(p.config.rho1, &LadderConfig::default());
        let rep = rho_sweep(&p, &ladder, c_hat, h, 4, Execution::Parallel).unwrap();
        let a = rep.limit().ball.index_of(&p.group.parse_word("a").unwrap()).unwrap();
        assert_eq!(rep.limit().cut_edges(), vec![(0, a)]);
        assert!(rep.monotone());
        assert!(rep.stable_from.iter().all(|&(_, i)| i == 0));
        for r in &rep.rungs {
            assert!(r.sigma_measured <= r.sigma_bound && r.condition.holds, "{r:?}");
        }
        // Strictly decreasing distance to the labelling.
        assert!(rep.rungs.windows(2).all(|w| w[1].sigma_measured < w[0].sigma_measured));
        let two = f2_problem(&["aa", "bb"], 1.0, vec![4]);
        let rep = rho_sweep(&two, &ladder, c_hat, h, 4, Execution::Sequential).unwrap();
        assert_eq!(rep.limit().cut_edges().len(), 2);
    }

    #[test]
    fn unstable_and_violating_ladders() {
        let p = f2_problem(&["a"], 1.0, vec![4]);
        let (c_hat, h) = c_hat_f2();
        // A coupling far above ρ0 leaves the phase bands.
        let hot = solve_ladder(&p, &[0.5], Execution::Sequential).unwrap();
        assert!(hot[0].distance_to_seed > p.config.sigma0);
        assert!(matches!(
            rho_sweep(&p, &[0.5], c_hat, h, 3, Execution::Sequential),
            Err(PlateauError::MiddleBand { .. } | PlateauError::Condition1 { .. })
        ));
    }
}
