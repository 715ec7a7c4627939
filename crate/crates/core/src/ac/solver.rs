//! Dirichlet solves by exact coordinate descent.

use super::field::{action, laplacian_raw, neighbor_sum};
use super::{AcError, Potential, ScalarField};
use crate::exec::{self, Execution};
use crate::group::{outer_set, CayleyBall, RimPolicy, SubsetHandle, EXTERNAL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Sites one at a time, sphere order, alternating direction.
    #[default]
    GaussSeidel,
    /// All sites of one colour class at once. Classes are independent sets of
    /// the Cayley graph, so each class update is an exact block minimisation
    /// and may run in parallel.
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub tol_probe: f64,
    pub max_sweeps: usize,
    pub mode: SweepMode,
    pub exec: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            tol_probe: 1e-6,
            max_sweeps: 200_000,
            mode: SweepMode::GaussSeidel,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub field: ScalarField,
    pub sweeps: usize,
    pub residual: f64,
    pub residual_trace: Vec<f64>,
    pub action_trace: Vec<f64>,
    /// Smallest action change over the `±tol_probe` single-site probes.
    pub probe_gain: f64,
}

impl SolveReport {
    /// No probe decreased the action beyond rounding.
    pub fn is_local_minimum(&self) -> bool {
        self.probe_gain >= -1e-13
    }

    /// Largest increase between consecutive sweeps (0 for a monotone run).
    pub fn worst_action_increase(&self) -> f64 {
        self.action_trace
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Minimiser of `V(y) + (ρ#S/2) y² - ρ Σ_h x_h y`, the part of the action
/// that depends on `x_g`.
#[inline]
fn site_update(ball: &CayleyBall, pot: &dyn Potential, x: &[f64], rho: f64, g: usize) -> f64 {
    let ns = ball.num_generators() as f64;
    pot.site_minimizer(rho * ns, rho * neighbor_sum(ball, x, g))
}

/// Action change from moving `x_g` to `y`.
fn site_delta(ball: &CayleyBall, pot: &dyn Potential, x: &[f64], rho: f64, g: usize, y: f64) -> f64 {
    let e = |v: f64| -> f64 {
        let pair: f64 = ball
            .neighbor_row(g)
            .iter()
            .map(|&h| {
                let d = x[h as usize] - v;
                d * d
            })
            .sum();
        pot.value(v) + 0.5 * rho * pair
    };
    e(y) - e(x[g])
}

fn sup_residual(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    rho: f64,
    free: &[usize],
    exec: Execution,
) -> f64 {
    exec::max_range(exec, free.len(), |i| {
        let g = free[i];
        (rho * laplacian_raw(ball, x, g) - pot.first(x[g])).abs()
    })
    .max(0.0)
}

/// Greedy proper colouring of the free sites, classes in site order.
fn colour_classes(ball: &CayleyBall, free: &[usize]) -> Vec<Vec<usize>> {
    let mut colour = vec![usize::MAX; ball.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &g in free {
        let mut used = vec![false; classes.len() + 1];
        for &h in ball.neighbor_row(g) {
            if h != EXTERNAL {
                let c = colour[h as usize];
                if c < used.len() {
                    used[c] = true;
                }
            }
        }
        let c = used.iter().position(|&u| !u).unwrap();
        colour[g] = c;
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(g);
    }
    classes
}

/// Minimises the action over the free (non-frozen) sites with the frozen
/// sites as boundary data, starting from the given values.
///
/// Every free site must be internal. Boundary data adjacent to the free
/// region must lie in `[c0, c1]`.
pub fn solve_dirichlet(
    ball: &CayleyBall,
    pot: &dyn Potential,
    start: &ScalarField,
    config: &SolverConfig,
) -> Result<SolveReport, AcError> {
    let rho = start.rho;
    let (c0, c1) = pot.wells();
    let free_set = start.free_sites();
    let free: Vec<usize> = free_set.iter().collect();
    for &g in &free {
        for &h in ball.neighbor_row(g) {
            if h == EXTERNAL {
                return Err(AcError::ExternalNeighbor { site: g });
            }
            let h = h as usize;
            let v = start.values[h];
            if start.frozen.contains(h) && !(c0 <= v && v <= c1) {
                return Err(AcError::BoundaryOutOfRange { site: h, value: v });
            }
        }
    }
    let region = outer_set(ball, &free_set, RimPolicy::Truncate).unwrap();
    let mut x = start.values.clone();
    let mut residual_trace = Vec::new();
    let mut action_trace = vec![action(ball, pot, &x, rho, &region, RimPolicy::Truncate)?];
    let classes = match config.mode {
        SweepMode::GaussSeidel => Vec::new(),
        SweepMode::Jacobi => colour_classes(ball, &free),
    };
    let mut res = sup_residual(ball, pot, &x, rho, &free, config.exec);
    residual_trace.push(res);
    let mut sweeps = 0;
    // At least one sweep, so a start on a saddle still moves to a site
    // minimiser.
    while res >= config.tol || (sweeps == 0 && !free.is_empty()) {
        if sweeps == config.max_sweeps && sweeps > 0 {
            return Err(AcError::NoConvergence {
                iterations: sweeps,
                residual: res,
                trace: residual_trace,
                last: x,
            });
        }
        match config.mode {
            SweepMode::GaussSeidel => {
                if sweeps % 2 == 0 {
                    for &g in &free {
                        x[g] = site_update(ball, pot, &x, rho, g);
                    }
                } else {
                    for &g in free.iter().rev() {
                        x[g] = site_update(ball, pot, &x, rho, g);
                    }
                }
            }
            SweepMode::Jacobi => {
                for class in &classes {
                    let xs = &x;
                    let new = exec::map_slice(config.exec, class, |&g| {
                        site_update(ball, pot, xs, rho, g)
                    });
                    for (&g, v) in class.iter().zip(new) {
                        x[g] = v;
                    }
                }
            }
        }
        sweeps += 1;
        res = sup_residual(ball, pot, &x, rho, &free, config.exec);
        residual_trace.push(res);
        action_trace.push(action(ball, pot, &x, rho, &region, RimPolicy::Truncate)?);
    }
    let probe_gain = {
        let xs = &x;
        -exec::max_range(config.exec, free.len(), |i| {
            let g = free[i];
            let up = site_delta(ball, pot, xs, rho, g, xs[g] + config.tol_probe);
            let down = site_delta(ball, pot, xs, rho, g, xs[g] - config.tol_probe);
            -(up.min(down))
        })
    };
    Ok(SolveReport {
        field: ScalarField {
            values: x,
            rho,
            frozen: start.frozen.clone(),
        },
        sweeps,
        residual: res,
        residual_trace,
        action_trace,
        probe_gain: if free.is_empty() { 0.0 } else { probe_gain },
    })
}

/// Frozen set for the Dirichlet problem on `B_m`: everything outside
/// `(B_m)^in = B_{m-1}`.
pub fn frozen_outside_ball(ball: &CayleyBall, m: usize) -> SubsetHandle {
    SubsetHandle::ball(ball, m.saturating_sub(1)).complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac::DoubleWell;
    use crate::group::GroupSpec;

    fn f2_ball(r: usize) -> CayleyBall {
        CayleyBall::build(&GroupSpec::free(2).unwrap(), r).unwrap()
    }

    #[test]
    fn constant_boundary_gives_constant() {
        let ball = f2_ball(4);
        let v = DoubleWell::default();
        let mut x = vec![-1.0; ball.len()];
        for g in ball.ball_range(2) {
            x[g] = 0.3;
        }
        let start = ScalarField::new(&ball, x, 0.4, frozen_outside_ball(&ball, 3)).unwrap();
        let rep = solve_dirichlet(&ball, &v, &start, &SolverConfig::default()).unwrap();
        assert!(rep.field.values.iter().all(|&y| (y + 1.0).abs() < 1e-9));
        assert!(rep.is_local_minimum());
        assert!(rep.worst_action_increase() <= 1e-12);
    }

    /// Minimises `V(y) + ρ/2 Σ (b_i - y)² ` by a 10⁻³ grid and bisection on
    /// the derivative.
    fn grid_oracle(v: &DoubleWell, rho: f64, b: &[f64]) -> f64 {
        let e = |y: f64| v.value(y) + 0.5 * rho * b.iter().map(|t| (t - y).powi(2)).sum::<f64>();
        let de = |y: f64| v.first(y) - rho * b.iter().map(|t| t - y).sum::<f64>();
        let mut best = -1.0;
        let mut k = 0;
        while k <= 2000 {
            let y = -1.0 + k as f64 * 1e-3;
            if e(y) < e(best) {
                best = y;
            }
            k += 1;
        }
        let (mut lo, mut hi) = (best - 1e-3, best + 1e-3);
        if de(lo) > 0.0 || de(hi) < 0.0 {
            return best;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if de(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn single_site_matches_grid_oracle() {
        let ball = f2_ball(1);
        let v = DoubleWell::default();
        let mut x = vec![0.0; ball.len()];
        x[1] = -1.0;
        x[2] = -1.0;
        x[3] = 1.0;
        x[4] = 1.0;
        let mut frozen = SubsetHandle::full(ball.len());
        frozen.remove(0);
        let start = ScalarField::new(&ball, x, 0.05, frozen).unwrap();
        let rep = solve_dirichlet(&ball, &v, &start, &SolverConfig::default()).unwrap();
        let oracle = grid_oracle(&v, 0.05, &[-1.0, -1.0, 1.0, 1.0]);
        // The data are symmetric under y -> -y, so both signs are minimisers.
        let y = rep.field.values[0];
        assert!((y - oracle).abs().min((y + oracle).abs()) < 1e-4, "{y} vs {oracle}");
        let b = [-0.3, 1.0, 0.8, -1.0];
        let mut x = vec![0.0; ball.len()];
        x[1..].copy_from_slice(&b);
        let mut frozen = SubsetHandle::full(ball.len());
        frozen.remove(0);
        let start = ScalarField::new(&ball, x, 0.05, frozen).unwrap();
        let rep = solve_dirichlet(&ball, &v, &start, &SolverConfig::default()).unwrap();
        assert!((rep.field.values[0] - grid_oracle(&v, 0.05, &b)).abs() < 1e-4);
    }

    #[test]
    fn modes_agree() {
        let ball = f2_ball(5);
        let v = DoubleWell::default();
        let mut x = vec![0.0; ball.len()];
        for g in 0..ball.len() {
            x[g] = if ball.word(g).first() == Some(&0) { -1.0 } else { 1.0 };
        }
        let start = ScalarField::new(&ball, x, 0.3, frozen_outside_ball(&ball, 5)).unwrap();
        let gs = solve_dirichlet(&ball, &v, &start, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig {
            mode: SweepMode::Jacobi,
            ..Default::default()
        };
        let jac = solve_dirichlet(&ball, &v, &start, &cfg).unwrap();
        let seq = solve_dirichlet(
            &ball,
            &v,
            &start,
            &SolverConfig {
                exec: Execution::Sequential,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(jac.field.values, seq.field.values);
        assert!(gs.field.sup_distance(&jac.field) < 1e-9);
        assert!(jac.worst_action_increase() <= 1e-12);
        for w in gs.field.values.iter() {
            assert!((-1.0..=1.0).contains(w));
        }
    }

    #[test]
    fn errors() {
        let ball = f2_ball(2);
        let v = DoubleWell::default();
        let mut frozen = SubsetHandle::full(ball.len());
        frozen.remove(0);
        let mut x = vec![-1.0; ball.len()];
        x[1] = 2.0;
        let start = ScalarField::new(&ball, x, 0.1, frozen).unwrap();
        assert!(matches!(
            solve_dirichlet(&ball, &v, &start, &SolverConfig::default()),
            Err(AcError::BoundaryOutOfRange { site: 1, .. })
        ));
        let mut frozen = SubsetHandle::full(ball.len());
        frozen.remove(ball.len() - 1);
        assert!(ScalarField::new(&ball, vec![0.0; ball.len()], 0.1, frozen).is_err());
        let mut x = vec![0.0; ball.len()];
        x[1] = 1.0;
        let start = ScalarField::new(&ball, x, 5.0, frozen_outside_ball(&ball, 2)).unwrap();
        let cfg = SolverConfig {
            max_sweeps: 1,
            ..Default::default()
        };
        assert!(matches!(
            solve_dirichlet(&ball, &v, &start, &cfg),
            Err(AcError::NoConvergence { .. })
        ));
    }
}
