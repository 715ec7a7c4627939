//! Finite unions of cylinder sets, kept in a normal form.

use super::{BoundaryError, BoundaryPoint, VisualMetricParams};
use crate::group::{Gen, GroupError, GroupSpec, Word};
use std::collections::{BTreeMap, BTreeSet};

/// A union of cylinders `Cyl(w) = {ξ : the ray to ξ starts with w}`.
///
/// The normal form has no prefix nested in another and no complete sibling
/// family, so two unions describe the same boundary set iff their prefix
/// lists are equal. The empty prefix stands for the whole boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CylinderUnion {
    prefixes: Vec<Word>,
}

fn children(group: &GroupSpec, w: &[Gen]) -> Vec<Word> {
    (0..group.num_generators() as Gen)
        .filter(|&s| group.can_follow(w.last().copied(), s))
        .map(|s| {
            let mut c = w.to_vec();
            c.push(s);
            c
        })
        .collect()
}

fn normalize(group: &GroupSpec, mut set: BTreeSet<Word>) -> Vec<Word> {
    loop {
        let nested: Vec<Word> = set
            .iter()
            .filter(|w| (0..w.len()).any(|l| set.contains(&w[..l])))
            .cloned()
            .collect();
        for w in &nested {
            set.remove(w);
        }
        let mut families: BTreeMap<Word, usize> = BTreeMap::new();
        for w in set.iter().filter(|w| !w.is_empty()) {
            *families.entry(w[..w.len() - 1].to_vec()).or_default() += 1;
        }
        let full: Vec<Word> = families
            .into_iter()
            .filter(|(p, n)| *n == children(group, p).len())
            .map(|(p, _)| p)
            .collect();
        if full.is_empty() && nested.is_empty() {
            break;
        }
        for p in full {
            for c in children(group, &p) {
                set.remove(&c);
            }
            set.insert(p);
        }
    }
    set.into_iter().collect()
}

impl CylinderUnion {
    pub fn new(group: &GroupSpec, prefixes: Vec<Word>) -> Result<Self, GroupError> {
        for w in &prefixes {
            if !group.is_reduced(w) {
                return Err(GroupError::NotReduced(w.clone()));
            }
        }
        Ok(Self {
            prefixes: normalize(group, prefixes.into_iter().collect()),
        })
    }

    pub fn parse(group: &GroupSpec, words: &[impl AsRef<str>]) -> Result<Self, GroupError> {
        let ws = words
            .iter()
            .map(|w| group.parse_word(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(group, ws)
    }

    pub fn whole() -> Self {
        Self {
            prefixes: vec![Vec::new()],
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn prefixes(&self) -> &[Word] {
        &self.prefixes
    }

    pub fn is_whole(&self) -> bool {
        self.prefixes.len() == 1 && self.prefixes[0].is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.prefixes.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn has_exact(&self, w: &[Gen]) -> bool {
        self.prefixes
            .binary_search_by(|p| p.as_slice().cmp(w))
            .is_ok()
    }

    /// Whether `Cyl(w) ⊆ U`.
    pub fn covers(&self, w: &[Gen]) -> bool {
        (0..=w.len().min(self.max_depth())).any(|l| self.has_exact(&w[..l]))
    }

    /// Whether `Cyl(w) ∩ U ≠ ∅`.
    pub fn meets(&self, w: &[Gen]) -> bool {
        self.covers(w) || self.prefixes.iter().any(|p| p.starts_with(w))
    }

    pub fn contains_point(&self, xi: &BoundaryPoint) -> bool {
        self.covers(&xi.prefix(self.max_depth()))
    }

    /// Whether `w` is exactly one of the normalised prefixes.
    pub fn is_prefix(&self, w: &[Gen]) -> bool {
        self.has_exact(w)
    }

    pub fn complement(&self, group: &GroupSpec) -> Self {
        fn rec(u: &CylinderUnion, group: &GroupSpec, w: Word, out: &mut BTreeSet<Word>) {
            if u.has_exact(&w) {
                return;
            }
            if !u.prefixes.iter().any(|p| p.len() > w.len() && p.starts_with(&w)) {
                out.insert(w);
                return;
            }
            for c in children(group, &w) {
                rec(u, group, c, out);
            }
        }
        let mut out = BTreeSet::new();
        rec(self, group, Vec::new(), &mut out);
        Self {
            prefixes: normalize(group, out),
        }
    }

    pub fn union(&self, group: &GroupSpec, other: &Self) -> Self {
        let set = self.prefixes.iter().chain(&other.prefixes).cloned().collect();
        Self {
            prefixes: normalize(group, set),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.prefixes.iter().all(|p| other.covers(p))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.prefixes.iter().all(|p| !other.meets(p))
    }

    pub fn format(&self, group: &GroupSpec) -> Vec<String> {
        self.prefixes.iter().map(|p| group.format_word(p)).collect()
    }
}

/// The two phases at infinity: `D0` as a cylinder union and `D1 = ∂G \ D0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySpec {
    pub d0: CylinderUnion,
    pub d1: CylinderUnion,
}

impl BoundarySpec {
    pub fn new(group: &GroupSpec, d0: CylinderUnion) -> Result<Self, BoundaryError> {
        if d0.is_empty() {
            return Err(BoundaryError::EmptyPhase0);
        }
        if d0.is_whole() {
            return Err(BoundaryError::EmptyPhase1);
        }
        let d1 = d0.complement(group);
        Ok(Self { d0, d1 })
    }

    pub fn parse(group: &GroupSpec, words: &[impl AsRef<str>]) -> Result<Self, BoundaryError> {
        Self::new(group, CylinderUnion::parse(group, words)?)
    }

    pub fn phase(&self, j: usize) -> &CylinderUnion {
        if j == 0 {
            &self.d0
        } else {
            &self.d1
        }
    }
}

/// A boundary set given either as cylinders or as a single point.
#[derive(Clone, Debug)]
pub enum BoundarySet {
    Cylinders(CylinderUnion),
    Point(BoundaryPoint),
}

/// Smallest integer `L >= 0` with `e^{-εL} <= r`.
pub fn ball_depth(r: f64, metric: &VisualMetricParams) -> usize {
    if r >= 1.0 {
        return 0;
    }
    let x = (1.0 / r).ln() / metric.epsilon;
    (x - 1e-9).ceil().max(0.0) as usize
}

/// The closed visual ball `{ξ : d(ξ, ξ0) <= r}` as a cylinder union.
pub fn ball_at_infinity(
    group: &GroupSpec,
    xi0: &BoundaryPoint,
    r: f64,
    metric: &VisualMetricParams,
) -> CylinderUnion {
    let l = ball_depth(r, metric);
    if l == 0 {
        return CylinderUnion::whole();
    }
    let stem = xi0.prefix(l - 1);
    let prefixes = group
        .clique_mates(xi0.letter(l - 1))
        .into_iter()
        .map(|v| {
            let mut w = stem.clone();
            w.push(v);
            w
        })
        .collect();
    CylinderUnion::new(group, prefixes).unwrap()
}

#[cfg(test)]
mod tests {
    use super::super::{gromov_depth, Point};
    use super::*;

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    #[test]
    fn normalization() {
        let g = f2();
        let u = CylinderUnion::parse(&g, &["a", "ab", "b"]).unwrap();
        assert_eq!(u.format(&g), vec!["a", "b"]);
        let w = CylinderUnion::parse(&g, &["a", "A", "b", "B"]).unwrap();
        assert!(w.is_whole());
        let v = CylinderUnion::parse(&g, &["aa", "ab", "aB"]).unwrap();
        assert_eq!(v.format(&g), vec!["a"]);
    }

    #[test]
    fn complement_partitions() {
        let g = f2();
        let u = CylinderUnion::parse(&g, &["ab", "B"]).unwrap();
        let c = u.complement(&g);
        assert!(u.is_disjoint(&c));
        assert!(u.union(&g, &c).is_whole());
        assert_eq!(c.complement(&g), u);
        assert_eq!(c.format(&g), vec!["aa", "aB", "A", "b"]);
    }

    #[test]
    fn boundary_spec_needs_both_phases() {
        let g = f2();
        assert_eq!(
            BoundarySpec::parse(&g, &[] as &[&str]).unwrap_err(),
            BoundaryError::EmptyPhase0
        );
        assert_eq!(
            BoundarySpec::parse(&g, &["a", "A", "b", "B"]).unwrap_err(),
            BoundaryError::EmptyPhase1
        );
        let s = BoundarySpec::parse(&g, &["a"]).unwrap();
        assert_eq!(s.d1.format(&g), vec!["A", "b", "B"]);
    }

    fn tail(g: &GroupSpec, last: Gen) -> Word {
        let n = g.num_generators() as Gen;
        let s = (0..n).find(|&s| g.can_follow(Some(last), s)).unwrap();
        let t = (0..n)
            .find(|&t| g.can_follow(Some(s), t) && g.can_follow(Some(t), s))
            .unwrap();
        vec![s, t]
    }

    #[test]
    fn ball_at_infinity_matches_metric() {
        for g in [f2(), GroupSpec::free_product(&[3, 2]).unwrap()] {
            let m = VisualMetricParams::default_for(&g);
            let xi0 = BoundaryPoint::parse(&g, "(ab)").unwrap();
            for l in 0..5 {
                let r = (-m.epsilon * l as f64).exp();
                let ball = ball_at_infinity(&g, &xi0, r, &m);
                // Compare with the metric on rays through every word of length 6.
                let words = crate::group::CayleyBall::build(&g, 6).unwrap();
                for x in words.sphere(6) {
                    let w = words.word(x);
                    let pt = BoundaryPoint::new(&g, w.clone(), tail(&g, *w.last().unwrap())).unwrap();
                    let d = gromov_depth(&g, &Point::Boundary(pt), &Point::Boundary(xi0.clone()));
                    let inside = d.map_or(true, |d| d >= l);
                    assert_eq!(ball.covers(&w), inside, "{} l={l}", g.format_word(&w));
                }
            }
        }
    }
}
