//! Executable forms of the lattice lemmas: the min/max inequality, the
//! comparison principle and the two-band range of small-coupling minimisers.

use super::field::action;
use super::{AcError, Potential};
use crate::group::{CayleyBall, RimPolicy, SubsetHandle, EXTERNAL};
use crate::phases::PhasePartition;
use serde::{Deserialize, Serialize};

/// `W(x) + W(y) - W(max(x,y)) - W(min(x,y))` on `region`.
pub fn minmax_check(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    y: &[f64],
    rho: f64,
    region: &SubsetHandle,
) -> Result<f64, AcError> {
    let hi: Vec<f64> = x.iter().zip(y).map(|(a, b)| a.max(*b)).collect();
    let lo: Vec<f64> = x.iter().zip(y).map(|(a, b)| a.min(*b)).collect();
    let w = |z: &[f64]| action(ball, pot, z, rho, region, RimPolicy::Strict);
    Ok(w(x)? + w(y)? - w(&hi)? - w(&lo)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ordering {
    Identical,
    /// `x < y` on every free site, up to `tied` sites where the two agree to
    /// rounding.
    StrictlyOrdered { tied: usize },
    Violation { site: usize, gap: f64 },
}

/// Classifies two minimisers with ordered data on the full boundary of the
/// free region. `tol` absorbs solver error.
pub fn comparison_check(
    ball: &CayleyBall,
    x: &[f64],
    y: &[f64],
    free: &SubsetHandle,
    tol: f64,
) -> Result<Ordering, AcError> {
    for g in free.iter() {
        for &h in ball.neighbor_row(g) {
            if h == EXTERNAL {
                return Err(AcError::ExternalNeighbor { site: g });
            }
            let h = h as usize;
            if !free.contains(h) && x[h] > y[h] {
                return Err(AcError::UnorderedBoundary { site: h });
            }
        }
    }
    let mut tied = 0;
    let mut identical = true;
    for g in free.iter() {
        let gap = x[g] - y[g];
        if gap > tol {
            return Ok(Ordering::Violation { site: g, gap });
        }
        if gap.abs() <= tol {
            tied += 1;
        } else {
            identical = false;
        }
    }
    let boundary_equal = free.iter().all(|g| {
        ball.neighbor_row(g)
            .iter()
            .all(|&h| (x[h as usize] - y[h as usize]).abs() <= tol)
    });
    if identical && boundary_equal {
        Ok(Ordering::Identical)
    } else {
        Ok(Ordering::StrictlyOrdered { tied })
    }
}

/// Labels by the bands `[c0, c0+σ0)` and `(c1-σ0, c1]`; any other value is
/// listed in `middle_band`.
pub fn classify_phases(values: &[f64], pot: &dyn Potential, sigma0: f64) -> PhasePartition {
    let (c0, c1) = pot.wells();
    PhasePartition::classify(values, c0, c1, sigma0)
}
