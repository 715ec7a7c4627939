//! Two-phase labelling of a field by the bands `[c0, c0+σ)` and `(c1-σ, c1]`.

use crate::group::{CayleyBall, SubsetHandle, EXTERNAL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePartition {
    pub d0: SubsetHandle,
    pub d1: SubsetHandle,
    /// Sites in neither band.
    pub middle_band: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Zero,
    One,
    Middle,
}

impl PhasePartition {
    pub fn classify(values: &[f64], c0: f64, c1: f64, sigma: f64) -> Self {
        let n = values.len();
        let mut d0 = SubsetHandle::empty(n);
        let mut d1 = SubsetHandle::empty(n);
        let mut middle_band = Vec::new();
        for (g, &v) in values.iter().enumerate() {
            if v >= c0 && v < c0 + sigma {
                d0.insert(g);
            } else if v > c1 - sigma && v <= c1 {
                d1.insert(g);
            } else {
                middle_band.push(g);
            }
        }
        Self {
            d0,
            d1,
            middle_band,
        }
    }

    /// Partition with `d0` given and `d1` its complement.
    pub fn from_d0(d0: SubsetHandle) -> Self {
        let d1 = d0.complement();
        Self {
            d0,
            d1,
            middle_band: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.d0.capacity()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phase(&self, g: usize) -> Phase {
        if self.d0.contains(g) {
            Phase::Zero
        } else if self.d1.contains(g) {
            Phase::One
        } else {
            Phase::Middle
        }
    }

    pub fn is_clean(&self) -> bool {
        self.middle_band.is_empty()
    }

    /// Unordered edges `{g, gs}` of the ball with one end in each phase, each
    /// listed once as `(min, max)`.
    pub fn crossing_edges(&self, ball: &CayleyBall) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for g in self.d0.iter() {
            for &h in ball.neighbor_row(g) {
                if h != EXTERNAL && self.d1.contains(h as usize) {
                    let h = h as usize;
                    out.push((g.min(h), g.max(h)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `∂^out D0 ∪ ∂^out D1` inside the ball: every site with a neighbour in
    /// the other phase.
    pub fn transition_sites(&self, ball: &CayleyBall) -> SubsetHandle {
        let mut t = SubsetHandle::empty(self.len());
        for (g, h) in self.crossing_edges(ball) {
            t.insert(g);
            t.insert(h);
        }
        t
    }

    /// Whether both partitions agree on the sites of `region`.
    pub fn agrees_on(&self, other: &Self, region: &SubsetHandle) -> Vec<usize> {
        region
            .iter()
            .filter(|&g| self.phase(g) != other.phase(g))
            .collect()
    }
}
