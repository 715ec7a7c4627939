//! Finite-scale surrogates for the two structural properties of a Plateau
//! solution: paths between the phases cross `T`, and no phase component is
//! finite.

use super::PlateauPartition;
use crate::boundary::{cone, BoundarySet, BoundarySpec};
use crate::group::{connected_components, geodesic_in_ball};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub pass: bool,
    pub vacuous: bool,
    pub pairs: usize,
    /// Pairs whose geodesic leaves the ball.
    pub skipped: usize,
    /// Fewest and most `T` sites on a checked geodesic.
    pub crossings: (usize, usize),
    /// Endpoints of geodesics that miss `T`.
    pub failures: Vec<(String, String)>,
}

/// Geodesics between rim sites of `cone(D0)` and `cone(D1)` must meet `T`.
/// All pairs are checked when there are at most `samples`, otherwise
/// `samples` random pairs.
pub fn separation_audit(
    partition: &PlateauPartition,
    boundary: &BoundarySpec,
    samples: usize,
    seed: u64,
) -> SeparationReport {
    let ball = &partition.ball;
    let rs = ball.group().shadow_radius();
    let rim = ball.sphere(ball.radius());
    let deep = |j: usize| -> Vec<usize> {
        let c = cone(ball, &BoundarySet::Cylinders(boundary.phase(j).clone()), rs);
        rim.clone().filter(|&g| c.contains(g)).collect()
    };
    let (a, b) = (deep(0), deep(1));
    let mut rep = SeparationReport {
        pass: true,
        vacuous: a.is_empty() || b.is_empty(),
        pairs: 0,
        skipped: 0,
        crossings: (usize::MAX, 0),
        failures: Vec::new(),
    };
    if rep.vacuous {
        rep.crossings = (0, 0);
        return rep;
    }
    let pairs: Vec<(usize, usize)> = if a.len() * b.len() <= samples {
        a.iter().flat_map(|&g| b.iter().map(move |&h| (g, h))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| (a[rng.gen_range(0..a.len())], b[rng.gen_range(0..b.len())]))
            .collect()
    };
    for (g, h) in pairs {
        let Some(path) = geodesic_in_ball(ball, g, h) else {
            rep.skipped += 1;
            continue;
        };
        rep.pairs += 1;
        let hits = path.iter().filter(|&&v| partition.transition.contains(v)).count();
        rep.crossings.0 = rep.crossings.0.min(hits);
        rep.crossings.1 = rep.crossings.1.max(hits);
        if hits == 0 {
            rep.pass = false;
            if rep.failures.len() < 16 {
                rep.failures.push((ball.word_string(g), ball.word_string(h)));
            }
        }
    }
    if rep.pairs == 0 {
        rep.crossings = (0, 0);
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentsReport {
    pub pass: bool,
    pub components: [usize; 2],
    /// Rim-avoiding components as `(phase, words)`.
    pub islands: Vec<(usize, Vec<String>)>,
}

/// Every component of `D0` and `D1` reaches the rim of the ball.
pub fn infinite_components_audit(partition: &PlateauPartition) -> ComponentsReport {
    let ball = &partition.ball;
    let r = ball.radius();
    let mut islands = Vec::new();
    let mut components = [0; 2];
    for (j, region) in [&partition.d0, &partition.d1].into_iter().enumerate() {
        let comps = connected_components(ball, region);
        components[j] = comps.len();
        for c in comps {
            if !c.iter().any(|&g| ball.length(g) == r) {
                islands.push((j, c.iter().map(|&g| ball.word_string(g)).collect()));
            }
        }
    }
    ComponentsReport {
        pass: islands.is_empty(),
        components,
        islands,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SubsetHandle;
    use crate::plateau::tests::cylinder_partition;

    #[test]
    fn cylinder_separates() {
        let p = cylinder_partition(&["a"], 4);
        let b = BoundarySpec::parse(p.ball.group(), &["a"]).unwrap();
        let r = separation_audit(&p, &b, 10_000, 1);
        assert!(r.pass && !r.vacuous);
        assert_eq!(r.pairs, 27 * 81);
        assert_eq!(r.crossings, (2, 2));
        let sampled = separation_audit(&p, &b, 100, 1);
        assert!(sampled.pass && sampled.pairs == 100);
    }

    #[test]
    fn punched_gap_fails() {
        let mut p = cylinder_partition(&["a"], 4);
        let b = BoundarySpec::parse(p.ball.group(), &["a"]).unwrap();
        p.transition = SubsetHandle::empty(p.ball.len());
        let r = separation_audit(&p, &b, 10_000, 1);
        assert!(!r.pass);
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn components() {
        let p = cylinder_partition(&["aa", "bb"], 4);
        let r = infinite_components_audit(&p);
        assert!(r.pass);
        assert_eq!(r.components, [2, 1]);
        let mut d0 = p.d0.clone();
        d0.insert(0);
        let island = PlateauPartition::from_d0(p.ball.clone(), d0.difference(&p.d0));
        let r = infinite_components_audit(&island);
        assert!(!r.pass);
        assert_eq!(r.islands, vec![(0, vec!["e".to_string()])]);
        let single = PlateauPartition::from_d0(p.ball.clone(), SubsetHandle::empty(p.ball.len()));
        let r = infinite_components_audit(&single);
        assert!(r.pass && r.components == [0, 1]);
    }
}
