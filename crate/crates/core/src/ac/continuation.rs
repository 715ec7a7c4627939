//! Continuation of anti-continuum solutions to small coupling by a
//! quasi-Newton contraction.

use super::field::{laplacian_raw, sup_distance};
use super::{AcError, Potential};
use crate::exec::{self, Execution};
use crate::group::{CayleyBall, SubsetHandle};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    /// Target contraction constant.
    pub k: f64,
    /// `min |V''|` over the wells, the only seed values used by the pipeline.
    pub hat_c: f64,
    /// Lipschitz constant of `V''`.
    pub lipschitz: f64,
    pub sigma0: f64,
    /// `2 #S (c1 - c0 + 2σ0)`.
    pub c_tilde: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub exec: Execution,
}

/// Smallest `|V'|` on `[c0, c1]` away from the `σ`-neighbourhoods of the
/// critical points.
fn band_gap(pot: &dyn Potential, sigma: f64) -> f64 {
    let (c0, c1) = pot.wells();
    let crit = pot.critical_points();
    let steps = 200_000;
    let mut gap = f64::INFINITY;
    let mut probe = |y: f64| {
        if crit.iter().all(|&c| (y - c).abs() >= sigma) {
            gap = gap.min(pot.first(y).abs());
        }
    };
    for i in 0..=steps {
        probe(c0 + (c1 - c0) * i as f64 / steps as f64);
    }
    for &c in &crit {
        probe(c - sigma);
        probe(c + sigma);
    }
    gap
}

impl ContinuationConfig {
    pub fn new(pot: &dyn Potential, num_generators: usize, k: f64) -> Result<Self, AcError> {
        if !(k > 0.0 && k < 1.0) {
            return Err(AcError::BadConfig(format!("k = {k} must lie in (0, 1)")));
        }
        let (c0, c1) = pot.wells();
        let width = c1 - c0;
        let hat_c = pot.second(c0).abs().min(pot.second(c1).abs());
        let lipschitz = pot.lipschitz_second();
        let sigma0 = (k * hat_c / (2.0 * lipschitz))
            .min(width / 3.0 * (1.0 - 1e-9))
            .min(0.5 * (1.0 - 1e-9));
        let ns = num_generators as f64;
        let c_tilde = 2.0 * ns * (width + 2.0 * sigma0);
        let rho0 = (k * hat_c / (2.0 * c_tilde)).min((1.0 - k) * sigma0 * hat_c / c_tilde);
        let gap = band_gap(pot, sigma0);
        let d_tilde = pot.barrier() - pot.value(c0);
        let admissible =
            |rho: f64| 2.0 * rho * width * ns < gap && ns * width * width * rho <= 2.0 * d_tilde;
        let rho1 = (0..64)
            .map(|j| rho0 * 0.5f64.powi(j))
            .find(|&r| admissible(r))
            .ok_or_else(|| AcError::BadConfig("no admissible rho1 in the dyadic sweep".into()))?;
        Ok(Self {
            k,
            hat_c,
            lipschitz,
            sigma0,
            c_tilde,
            rho0,
            rho1,
            max_iter: 10_000,
            tol: 1e-13,
            exec: Execution::Parallel,
        })
    }

    /// A-priori distance of the fixed point from a two-valued seed:
    /// `‖K(x⁰) - x⁰‖ / (1 - k)` with `|Δx⁰| <= #S (c1 - c0)`.
    pub fn sigma_bound(&self, rho: f64, num_generators: usize, width: f64) -> f64 {
        rho * num_generators as f64 * width / (self.hat_c * (1.0 - self.k))
    }
}

fn check_seed(pot: &dyn Potential, seed: &[f64]) -> Result<(), AcError> {
    let crit = pot.critical_points();
    for (g, &v) in seed.iter().enumerate() {
        let ok = crit.iter().any(|&c| (v - c).abs() <= 1e-12) && pot.second(v) != 0.0;
        if !ok {
            return Err(AcError::NonMorseSeed { site: g, value: v });
        }
    }
    Ok(())
}

fn check_interior(ball: &CayleyBall, interior: &SubsetHandle) -> Result<(), AcError> {
    match interior.iter().find(|&g| ball.is_rim(g)) {
        Some(g) => Err(AcError::ExternalNeighbor { site: g }),
        None => Ok(()),
    }
}

/// `K(X)_g = X_g - (V'(X_g) - 1_{B^in}(g) ρ Δ_g X) / V''(x⁰_g)`.
///
/// This is Newton's method for `V'(X) - ρΔX = 0` with the derivative frozen
/// at the seed.
pub fn quasi_newton_step(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    seed: &[f64],
    rho: f64,
    interior: &SubsetHandle,
    exec: Execution,
) -> Result<Vec<f64>, AcError> {
    check_interior(ball, interior)?;
    if let Some(g) = seed.iter().position(|&v| pot.second(v) == 0.0) {
        return Err(AcError::NonMorseSeed {
            site: g,
            value: seed[g],
        });
    }
    Ok(step_unchecked(ball, pot, x, seed, rho, interior, exec))
}

fn step_unchecked(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    seed: &[f64],
    rho: f64,
    interior: &SubsetHandle,
    exec: Execution,
) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    exec::fill(exec, &mut out, |g| {
        let mut f = pot.first(x[g]);
        if interior.contains(g) {
            f -= rho * laplacian_raw(ball, x, g);
        }
        x[g] - f / pot.second(seed[g])
    });
    out
}

/// `‖K(X) - K(Y)‖∞ / ‖X - Y‖∞`.
#[allow(clippy::too_many_arguments)]
pub fn contraction_ratio(
    ball: &CayleyBall,
    pot: &dyn Potential,
    seed: &[f64],
    rho: f64,
    interior: &SubsetHandle,
    x: &[f64],
    y: &[f64],
    exec: Execution,
) -> Result<f64, AcError> {
    let kx = quasi_newton_step(ball, pot, x, seed, rho, interior, exec)?;
    let ky = quasi_newton_step(ball, pot, y, seed, rho, interior, exec)?;
    Ok(sup_distance(&kx, &ky) / sup_distance(x, y))
}

#[derive(Clone, Debug)]
pub struct ContinuationReport {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// `d_m = ‖X_{m+1} - X_m‖∞`.
    pub steps: Vec<f64>,
    /// `‖X_m - x^ρ‖∞` for every iterate.
    pub errors: Vec<f64>,
    /// `‖x^ρ - x⁰‖∞`.
    pub distance_to_seed: f64,
    /// Sup-norm of `ρΔ - V'` over the interior at the fixed point.
    pub residual: f64,
    /// `errors[m] <= σ0 k^m` for all `m`.
    pub envelope_holds: bool,
    /// `d_{m+1} <= k d_m + 10⁻¹²` for all `m`.
    pub contraction_holds: bool,
}

/// Iterates the quasi-Newton map from the seed itself.
pub fn continue_from_seed(
    ball: &CayleyBall,
    pot: &dyn Potential,
    seed: &[f64],
    rho: f64,
    interior: &SubsetHandle,
    config: &ContinuationConfig,
) -> Result<ContinuationReport, AcError> {
    continue_from(ball, pot, seed, seed, rho, interior, config)
}

/// Iterates the quasi-Newton map around `seed` from any start in its
/// `σ0`-ball.
pub fn continue_from(
    ball: &CayleyBall,
    pot: &dyn Potential,
    seed: &[f64],
    start: &[f64],
    rho: f64,
    interior: &SubsetHandle,
    config: &ContinuationConfig,
) -> Result<ContinuationReport, AcError> {
    if rho > config.rho0 {
        return Err(AcError::RhoTooLarge {
            rho,
            rho0: config.rho0,
        });
    }
    if seed.len() != ball.len() || start.len() != ball.len() {
        return Err(AcError::SizeMismatch {
            expected: ball.len(),
            got: seed.len().min(start.len()),
        });
    }
    check_seed(pot, seed)?;
    check_interior(ball, interior)?;
    let d0 = sup_distance(seed, start);
    if d0 > config.sigma0 {
        return Err(AcError::OutsideSigmaBall {
            distance: d0,
            sigma0: config.sigma0,
        });
    }
    let exec = config.exec;
    let mut iterates = vec![start.to_vec()];
    let mut steps = Vec::new();
    loop {
        let last = iterates.last().unwrap();
        let next = step_unchecked(ball, pot, last, seed, rho, interior, exec);
        let d = sup_distance(&next, last);
        steps.push(d);
        iterates.push(next);
        if d <= config.tol || steps.len() >= config.max_iter {
            break;
        }
    }
    let fixed = iterates.pop().unwrap();
    let residual = exec::max_range(exec, ball.len(), |g| {
        if interior.contains(g) {
            (rho * laplacian_raw(ball, &fixed, g) - pot.first(fixed[g])).abs()
        } else {
            0.0
        }
    })
    .max(0.0);
    if steps.last().copied().unwrap_or(0.0) > config.tol {
        return Err(AcError::NoConvergence {
            iterations: steps.len(),
            residual,
            trace: steps,
            last: fixed,
        });
    }
    let errors: Vec<f64> = iterates.iter().map(|x| sup_distance(x, &fixed)).collect();
    let envelope_holds = errors
        .iter()
        .enumerate()
        .all(|(m, &e)| e <= config.sigma0 * config.k.powi(m as i32) + 1e-12);
    let contraction_holds = steps
        .windows(2)
        .all(|w| w[1] <= config.k * w[0] + 1e-12);
    Ok(ContinuationReport {
        distance_to_seed: sup_distance(&fixed, seed),
        values: fixed,
        iterations: steps.len(),
        steps,
        errors,
        residual,
        envelope_holds,
        contraction_holds,
    })
}
