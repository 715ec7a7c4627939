//! Fields on a ball, the discrete Laplacian, the action and the residual.

use super::{AcError, Potential};
use crate::group::{CayleyBall, RimPolicy, SubsetHandle, EXTERNAL};

/// Values on every element of one ball, a coupling `ρ`, and the set of
/// frozen (Dirichlet) sites that no solver may change.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub rho: f64,
    pub frozen: SubsetHandle,
}

impl ScalarField {
    /// A field whose free sites are all internal.
    pub fn new(
        ball: &CayleyBall,
        values: Vec<f64>,
        rho: f64,
        frozen: SubsetHandle,
    ) -> Result<Self, AcError> {
        if values.len() != ball.len() || frozen.capacity() != ball.len() {
            return Err(AcError::SizeMismatch {
                expected: ball.len(),
                got: values.len(),
            });
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(AcError::BadRho(rho));
        }
        if let Some(g) = values.iter().position(|v| !v.is_finite()) {
            return Err(AcError::NonFinite { site: g });
        }
        if let Some(g) = (0..ball.len()).find(|&g| !frozen.contains(g) && ball.is_rim(g)) {
            return Err(AcError::ExternalNeighbor { site: g });
        }
        Ok(Self {
            values,
            rho,
            frozen,
        })
    }

    /// Constant field, frozen everywhere.
    pub fn constant(ball: &CayleyBall, value: f64) -> Self {
        Self {
            values: vec![value; ball.len()],
            rho: 0.0,
            frozen: SubsetHandle::full(ball.len()),
        }
    }

    pub fn free_sites(&self) -> SubsetHandle {
        self.frozen.complement()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_distance(&self.values, &other.values)
    }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `Σ_s (x_{gs} - x_g)` for a site with no external neighbour.
#[inline]
pub(crate) fn laplacian_raw(ball: &CayleyBall, x: &[f64], g: usize) -> f64 {
    let xg = x[g];
    ball.neighbor_row(g)
        .iter()
        .map(|&h| x[h as usize] - xg)
        .sum()
}

/// Sum of neighbour values of an internal site.
#[inline]
pub(crate) fn neighbor_sum(ball: &CayleyBall, x: &[f64], g: usize) -> f64 {
    ball.neighbor_row(g).iter().map(|&h| x[h as usize]).sum()
}

pub fn laplacian(ball: &CayleyBall, x: &[f64], g: usize) -> Result<f64, AcError> {
    if ball.is_rim(g) {
        return Err(AcError::ExternalNeighbor { site: g });
    }
    Ok(laplacian_raw(ball, x, g))
}

/// `ρ Δ_g x - V'(x_g)`, which is `-∂W/∂x_g`.
pub fn residual(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    rho: f64,
    g: usize,
) -> Result<f64, AcError> {
    Ok(rho * laplacian(ball, x, g)? - pot.first(x[g]))
}

/// `W_B(x) = Σ_{g∈B} [Σ_s ρ/4 (x_{gs} - x_g)² + V(x_g)]`.
///
/// With the strict policy every site of `B` must be internal; with truncate
/// the missing pairs at the rim are dropped.
pub fn action(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    rho: f64,
    region: &SubsetHandle,
    policy: RimPolicy,
) -> Result<f64, AcError> {
    let mut total = 0.0;
    for g in region.iter() {
        let xg = x[g];
        let mut pair = 0.0;
        for &h in ball.neighbor_row(g) {
            if h == EXTERNAL {
                if policy == RimPolicy::Strict {
                    return Err(AcError::ExternalNeighbor { site: g });
                }
                continue;
            }
            let d = x[h as usize] - xg;
            pair += d * d;
        }
        total += 0.25 * rho * pair + pot.value(xg);
    }
    Ok(total)
}

/// Action restricted to pairs with both ends in the window `Ω`.
pub fn action_on_window(
    ball: &CayleyBall,
    pot: &dyn Potential,
    x: &[f64],
    rho: f64,
    window: &SubsetHandle,
) -> f64 {
    let mut total = 0.0;
    for g in window.iter() {
        let xg = x[g];
        let mut pair = 0.0;
        for &h in ball.neighbor_row(g) {
            if h != EXTERNAL && window.contains(h as usize) {
                let d = x[h as usize] - xg;
                pair += d * d;
            }
        }
        total += 0.25 * rho * pair + pot.value(xg);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac::DoubleWell;
    use crate::group::GroupSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (CayleyBall, DoubleWell) {
        let g = GroupSpec::free(2).unwrap();
        (CayleyBall::build(&g, 4).unwrap(), DoubleWell::default())
    }

    #[test]
    fn laplacian_examples() {
        let (ball, _) = setup();
        let x: Vec<f64> = (0..ball.len()).map(|g| ball.length(g) as f64).collect();
        assert_eq!(laplacian(&ball, &x, 0).unwrap(), 4.0);
        let c = vec![0.3; ball.len()];
        assert_eq!(laplacian(&ball, &c, 5).unwrap(), 0.0);
        let rim = ball.sphere(4).start;
        assert!(laplacian(&ball, &c, rim).is_err());
    }

    #[test]
    fn action_examples() {
        let (ball, v) = setup();
        let b = SubsetHandle::ball(&ball, 2);
        let c0 = vec![-1.0; ball.len()];
        assert_eq!(action(&ball, &v, &c0, 0.3, &b, RimPolicy::Strict).unwrap(), 0.0);
        let zero = vec![0.0; ball.len()];
        let w = action(&ball, &v, &zero, 0.3, &b, RimPolicy::Strict).unwrap();
        assert!((w - b.count() as f64 * 0.25).abs() < 1e-12);
        // One-site bump on B_1: four pairs of squared jump 4 at the centre and
        // one at each neighbour; V vanishes at both wells.
        let mut bump = c0.clone();
        bump[0] = 1.0;
        let b1 = SubsetHandle::ball(&ball, 1);
        let w = action(&ball, &v, &bump, 0.1, &b1, RimPolicy::Strict).unwrap();
        let oracle = 0.25 * 0.1 * (4.0 * 4.0 + 4.0 * 4.0);
        assert!((w - oracle).abs() < 1e-14);
        let full = SubsetHandle::full(ball.len());
        assert!(action(&ball, &v, &c0, 0.3, &full, RimPolicy::Strict).is_err());
    }

    #[test]
    fn residual_is_negative_gradient() {
        let (ball, v) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..ball.len()).map(|_| rng.gen_range(-1.2..1.2)).collect();
        let rho = 0.37;
        let region = SubsetHandle::ball(&ball, 3);
        for _ in 0..100 {
            let g = rng.gen_range(0..ball.ball_size(2));
            let h = 1e-6;
            let mut xp = x.clone();
            xp[g] += h;
            let mut xm = x.clone();
            xm[g] -= h;
            let wp = action(&ball, &v, &xp, rho, &region, RimPolicy::Strict).unwrap();
            let wm = action(&ball, &v, &xm, rho, &region, RimPolicy::Strict).unwrap();
            let fd = -(wp - wm) / (2.0 * h);
            let r = residual(&ball, &v, &x, rho, g).unwrap();
            assert!((fd - r).abs() <= 1e-6 * r.abs().max(1.0), "{fd} vs {r}");
        }
    }
}
