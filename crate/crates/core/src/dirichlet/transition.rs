//! The transition set of a Dirichlet solution and the two audits on its
//! phase regions: components reach the rim, and the quasi-minimality bound.

use crate::ac::Potential;
use crate::group::{
    boundary_in, boundary_out, connected_components, CayleyBall, RimPolicy, SubsetHandle,
    EXTERNAL,
};
use crate::phases::PhasePartition;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSet {
    pub sites: SubsetHandle,
    /// Unordered pairs `(g, h)`, `g < h`, with `|x_g - x_h| >= 2σ0`.
    pub edges: Vec<(usize, usize)>,
    pub n: usize,
    /// Word length of the closest transition site; `None` if empty.
    pub distance_to_id: Option<usize>,
}

impl TransitionSet {
    /// Connected components of the site set.
    pub fn components(&self, ball: &CayleyBall) -> Vec<Vec<usize>> {
        connected_components(ball, &self.sites)
    }
}

fn window(ball: &CayleyBall, n: usize) -> usize {
    ball.ball_size((n + 1).min(ball.radius()))
}

/// Phase regions `B_N^{c_j}` inside `B_{N+1}` by the `σ0` bands.
pub fn phase_regions(ball: &CayleyBall, values: &[f64], n: usize, pot: &dyn Potential, sigma0: f64) -> PhasePartition {
    let (c0, c1) = pot.wells();
    let k = window(ball, n);
    let mut p = PhasePartition::classify(values, c0, c1, sigma0);
    let inside = SubsetHandle::from_indices(ball.len(), 0..k);
    p.d0 = p.d0.intersection(&inside);
    p.d1 = p.d1.intersection(&inside);
    p.middle_band.retain(|&g| g < k);
    p
}

/// Sites of `B_{N+1}` with a neighbour in `B_{N+1}` whose value differs by
/// at least `2σ0`.
pub fn extract_transition_set(ball: &CayleyBall, values: &[f64], n: usize, sigma0: f64) -> TransitionSet {
    let k = window(ball, n);
    let mut sites = SubsetHandle::empty(ball.len());
    let mut edges = Vec::new();
    for g in 0..k {
        for &h in ball.neighbor_row(g) {
            if h == EXTERNAL || h as usize >= k {
                continue;
            }
            let h = h as usize;
            if (values[g] - values[h]).abs() >= 2.0 * sigma0 {
                sites.insert(g);
                if g < h {
                    edges.push((g, h));
                }
            }
        }
    }
    edges.sort_unstable();
    let distance_to_id = sites.iter().map(|g| ball.length(g)).min();
    TransitionSet {
        sites,
        edges,
        n,
        distance_to_id,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentsAudit {
    pub pass: bool,
    /// Number of components of `B_N^{c0}` and `B_N^{c1}`.
    pub components: [usize; 2],
    /// Components that miss `S_{N+1}`, with their phase.
    pub islands: Vec<(usize, Vec<usize>)>,
}

/// Every component of each phase region inside `B_{N+1}` meets `S_{N+1}`.
pub fn connected_components_audit(
    ball: &CayleyBall,
    values: &[f64],
    n: usize,
    pot: &dyn Potential,
    sigma0: f64,
) -> ComponentsAudit {
    let p = phase_regions(ball, values, n, pot, sigma0);
    let rim = (n + 1).min(ball.radius());
    let mut islands = Vec::new();
    let mut components = [0; 2];
    for (j, region) in [&p.d0, &p.d1].into_iter().enumerate() {
        let comps = connected_components(ball, region);
        components[j] = comps.len();
        for c in comps {
            if !c.iter().any(|&g| ball.length(g) == rim) {
                islands.push((j, c));
            }
        }
    }
    ComponentsAudit {
        pass: islands.is_empty(),
        components,
        islands,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiMinimality {
    /// `#(∂^out B_N^{c1} ∩ D)`.
    pub count: usize,
    /// `6 #S · #(∂^in D ∩ B_N^{c1})`.
    pub bound: usize,
    pub slack: i64,
}

impl QuasiMinimality {
    pub fn holds(&self) -> bool {
        self.slack >= 0
    }
}

/// The bound `#(∂^out B_N^{c1} ∩ D) <= 6 #S #(∂^in D ∩ B_N^{c1})` for a
/// finite `D` inside the ball.
pub fn quasi_minimality_audit(
    ball: &CayleyBall,
    values: &[f64],
    n: usize,
    pot: &dyn Potential,
    sigma0: f64,
    d: &SubsetHandle,
) -> QuasiMinimality {
    let p = phase_regions(ball, values, n, pot, sigma0);
    let out = boundary_out(ball, &p.d1, RimPolicy::Truncate).unwrap();
    let count = out.intersection(d).count();
    let din = boundary_in(ball, d).unwrap();
    let bound = 6 * ball.num_generators() * din.intersection(&p.d1).count();
    QuasiMinimality {
        count,
        bound,
        slack: bound as i64 - count as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac::DoubleWell;
    use crate::dirichlet::solve_one;
    use crate::dirichlet::tests::f2_problem;
    use crate::group::GroupSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SIGMA0: f64 = 1.0 / 24.0;

    #[test]
    fn constant_field_has_no_transition() {
        let g = GroupSpec::free(2).unwrap();
        let ball = CayleyBall::build(&g, 3).unwrap();
        let x = vec![1.0; ball.len()];
        let t = extract_transition_set(&ball, &x, 2, SIGMA0);
        assert!(t.sites.is_empty() && t.distance_to_id.is_none());
        let a = connected_components_audit(&ball, &x, 2, &DoubleWell::default(), SIGMA0);
        assert!(a.pass);
        assert_eq!(a.components, [0, 1]);
    }

    #[test]
    fn cylinder_solution_audits() {
        let p = f2_problem(&["a"], 0.1, vec![5]);
        let sol = solve_one(&p, 5).unwrap();
        let v = &p.potential;
        let x = &sol.field.values;
        let t = extract_transition_set(&sol.ball, x, 5, SIGMA0);
        assert_eq!(t.distance_to_id, Some(0));
        let a = sol.ball.index_of(&p.group.parse_word("a").unwrap()).unwrap();
        assert_eq!(t.edges, vec![(0, a)]);
        assert!(connected_components_audit(&sol.ball, x, 5, v, SIGMA0).pass);
        let whole = SubsetHandle::full(sol.ball.len());
        assert!(quasi_minimality_audit(&sol.ball, x, 5, v, SIGMA0, &whole).holds());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let picks: Vec<bool> = (0..sol.ball.len()).map(|_| rng.gen_bool(0.3)).collect();
            let d = SubsetHandle::from_predicate(sol.ball.len(), |g| picks[g]);
            assert!(quasi_minimality_audit(&sol.ball, x, 5, v, SIGMA0, &d).holds());
        }
        let two = f2_problem(&["aa", "bb"], 0.1, vec![4]);
        let sol = solve_one(&two, 4).unwrap();
        let t = extract_transition_set(&sol.ball, &sol.field.values, 4, SIGMA0);
        assert_eq!(t.components(&sol.ball).len(), 2);
        assert_eq!(t.edges.len(), 2);
    }

    #[test]
    fn singleton_window_breaks_the_bound() {
        // D = {a} meets ∂^out B^{c1} at `a` while ∂^in D = {a} misses B^{c1}.
        let p = f2_problem(&["a"], 0.1, vec![5]);
        let sol = solve_one(&p, 5).unwrap();
        let a = sol.ball.index_of(&p.group.parse_word("a").unwrap()).unwrap();
        let d = SubsetHandle::from_indices(sol.ball.len(), [a]);
        let q = quasi_minimality_audit(&sol.ball, &sol.field.values, 5, &p.potential, SIGMA0, &d);
        assert_eq!((q.count, q.bound, q.slack), (1, 0, -1));
    }

    #[test]
    fn island_fails() {
        let g = GroupSpec::free(2).unwrap();
        let ball = CayleyBall::build(&g, 3).unwrap();
        let mut x = vec![1.0; ball.len()];
        x[0] = -1.0;
        let a = connected_components_audit(&ball, &x, 2, &DoubleWell::default(), SIGMA0);
        assert!(!a.pass);
        assert_eq!(a.islands, vec![(0, vec![0])]);
    }
}
