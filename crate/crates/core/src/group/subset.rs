//! Site subsets of a ball and their outer, inner and boundary sets.

use super::{CayleyBall, GroupError, EXTERNAL};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// How to treat neighbours that fall outside the ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RimPolicy {
    /// Fail if the exact answer would need sites outside the ball.
    #[default]
    Strict,
    /// Drop external neighbours; the answer is exact only away from the rim.
    Truncate,
}

/// Membership bitmask over the elements of one ball.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetHandle {
    bits: FixedBitSet,
}

impl SubsetHandle {
    pub fn empty(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn from_predicate(n: usize, f: impl Fn(usize) -> bool) -> Self {
        Self::from_indices(n, (0..n).filter(|&i| f(i)))
    }

    /// `B_m` inside `ball`.
    pub fn ball(ball: &CayleyBall, m: usize) -> Self {
        let mut s = Self::empty(ball.len());
        s.bits.insert_range(ball.ball_range(m));
        s
    }

    /// `S_m` inside `ball`.
    pub fn sphere(ball: &CayleyBall, m: usize) -> Self {
        let mut s = Self::empty(ball.len());
        s.bits.insert_range(ball.sphere(m));
        s
    }

    /// Universe size.
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits.set(i, false);
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut b = self.bits.clone();
        b.union_with(&other.bits);
        Self { bits: b }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut b = self.bits.clone();
        b.intersect_with(&other.bits);
        Self { bits: b }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut b = self.bits.clone();
        b.difference_with(&other.bits);
        Self { bits: b }
    }

    pub fn complement(&self) -> Self {
        let mut b = self.bits.clone();
        b.toggle_range(..);
        Self { bits: b }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub(crate) fn check_size(&self, ball: &CayleyBall) -> Result<(), GroupError> {
        if self.capacity() != ball.len() {
            return Err(GroupError::SizeMismatch {
                expected: ball.len(),
                got: self.capacity(),
            });
        }
        Ok(())
    }
}

/// `A ∪ ∂^out A`, the closed unit neighbourhood of `a`.
pub fn outer_set(
    ball: &CayleyBall,
    a: &SubsetHandle,
    policy: RimPolicy,
) -> Result<SubsetHandle, GroupError> {
    a.check_size(ball)?;
    let mut out = a.clone();
    for g in a.iter() {
        for &h in ball.neighbor_row(g) {
            if h == EXTERNAL {
                if policy == RimPolicy::Strict {
                    return Err(GroupError::ExternalNeighbor { site: g });
                }
            } else {
                out.insert(h as usize);
            }
        }
    }
    Ok(out)
}

/// Sites of `a` all of whose neighbours are in `a`. External neighbours are
/// never in `a`, so rim sites are never interior; this is exact.
pub fn inner_set(ball: &CayleyBall, a: &SubsetHandle) -> Result<SubsetHandle, GroupError> {
    a.check_size(ball)?;
    Ok(SubsetHandle::from_indices(
        ball.len(),
        a.iter().filter(|&g| {
            ball.neighbor_row(g)
                .iter()
                .all(|&h| h != EXTERNAL && a.contains(h as usize))
        }),
    ))
}

pub fn boundary_out(
    ball: &CayleyBall,
    a: &SubsetHandle,
    policy: RimPolicy,
) -> Result<SubsetHandle, GroupError> {
    Ok(outer_set(ball, a, policy)?.difference(a))
}

pub fn boundary_in(ball: &CayleyBall, a: &SubsetHandle) -> Result<SubsetHandle, GroupError> {
    Ok(a.difference(&inner_set(ball, a)?))
}

/// `∂^in A ∪ ∂^out A`.
pub fn boundary(
    ball: &CayleyBall,
    a: &SubsetHandle,
    policy: RimPolicy,
) -> Result<SubsetHandle, GroupError> {
    Ok(boundary_out(ball, a, policy)?.union(&boundary_in(ball, a)?))
}

/// Connected components of the subgraph induced on `a`, each sorted, listed
/// by smallest element.
pub fn connected_components(ball: &CayleyBall, a: &SubsetHandle) -> Vec<Vec<usize>> {
    let mut seen = SubsetHandle::empty(ball.len());
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for start in a.iter() {
        if seen.contains(start) {
            continue;
        }
        seen.insert(start);
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(g) = queue.pop_front() {
            comp.push(g);
            for &h in ball.neighbor_row(g) {
                if h != EXTERNAL && a.contains(h as usize) && !seen.contains(h as usize) {
                    seen.insert(h as usize);
                    queue.push_back(h as usize);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}
