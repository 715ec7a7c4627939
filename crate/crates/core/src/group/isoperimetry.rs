//! Empirical isoperimetric audit.

use super::{boundary_out, CayleyBall, GroupError, RimPolicy, SubsetHandle, EXTERNAL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(#A / log #A) / #∂^out A` with `log max(#A, 2)`, computed with the strict
/// rim policy.
pub fn isoperimetric_ratio(ball: &CayleyBall, a: &SubsetHandle) -> Result<f64, GroupError> {
    let b = boundary_out(ball, a, RimPolicy::Strict)?;
    let n = a.count() as f64;
    Ok(n / n.max(2.0).ln() / b.count() as f64)
}

/// Running maximum of isoperimetric ratios over a corpus of finite sets.
#[derive(Clone, Debug, Default)]
pub struct IsoperimetricAudit {
    pub samples: usize,
    pub max_ratio: f64,
    pub worst_size: usize,
}

impl IsoperimetricAudit {
    pub fn record(&mut self, ratio: f64, size: usize) {
        self.samples += 1;
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.worst_size = size;
        }
    }

    /// Balls `B_m`, geodesic segments and random connected sets that stay
    /// off the rim.
    pub fn run(ball: &CayleyBall, samples: usize, seed: u64) -> Result<Self, GroupError> {
        let mut audit = Self::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior = ball.radius().saturating_sub(1);
        for m in 0..=interior {
            let a = SubsetHandle::ball(ball, m);
            audit.record(isoperimetric_ratio(ball, &a)?, a.count());
        }
        let max_site = ball.ball_size(interior);
        for g in ball.sphere(interior) {
            let mut a = SubsetHandle::empty(ball.len());
            let mut cur = g;
            a.insert(cur);
            while let Some(p) = ball.parent(cur) {
                a.insert(p);
                cur = p;
            }
            audit.record(isoperimetric_ratio(ball, &a)?, a.count());
            if audit.samples > samples {
                break;
            }
        }
        for _ in 0..samples {
            let target = rng.gen_range(1..=64usize);
            let start = rng.gen_range(0..max_site);
            let mut a = SubsetHandle::empty(ball.len());
            let mut frontier = vec![start];
            a.insert(start);
            while a.count() < target && !frontier.is_empty() {
                let i = rng.gen_range(0..frontier.len());
                let g = frontier[i];
                let s = rng.gen_range(0..ball.num_generators());
                let h = ball.neighbor_row(g)[s];
                if h == EXTERNAL || ball.is_rim(h as usize) {
                    frontier.swap_remove(i);
                    continue;
                }
                if !a.contains(h as usize) {
                    a.insert(h as usize);
                    frontier.push(h as usize);
                }
            }
            audit.record(isoperimetric_ratio(ball, &a)?, a.count());
        }
        Ok(audit)
    }
}
