//! Cones over boundary sets, separating sets and cone growth.

use super::{
    ball_at_infinity, ball_depth, gromov_depth, truncate, BoundaryError, BoundaryPoint,
    BoundarySet, CylinderUnion, Point, VisualMetricParams,
};
use crate::group::{least_squares_slope, CayleyBall, Gen, GroupSpec, SubsetHandle, EXTERNAL};
use std::collections::VecDeque;

/// `covered[g]` iff `Cyl(word(g)) ⊆ U`.
pub fn covered_sites(ball: &CayleyBall, u: &CylinderUnion) -> Vec<bool> {
    let mut covered = vec![false; ball.len()];
    covered[0] = u.is_whole();
    for p in u.prefixes() {
        if let Some(i) = ball.index_of(p) {
            covered[i] = true;
        }
    }
    for g in 1..ball.len() {
        if covered[ball.parent(g).unwrap()] {
            covered[g] = true;
        }
    }
    covered
}

/// `{g : S(g,R) ⊆ U}`. A single boundary point has empty interior, so its
/// cone is empty.
pub fn cone(ball: &CayleyBall, u: &BoundarySet, r: usize) -> SubsetHandle {
    let u = match u {
        BoundarySet::Point(_) => return SubsetHandle::empty(ball.len()),
        BoundarySet::Cylinders(c) => c,
    };
    let covered = covered_sites(ball, u);
    SubsetHandle::from_predicate(ball.len(), |g| {
        let d = ball.length(g).saturating_sub(r);
        covered[ball.ancestor(g, d)]
    })
}

/// Cone membership for an arbitrary normal form, inside the ball or not.
pub fn in_cone(u: &CylinderUnion, word: &[Gen], r: usize) -> bool {
    u.covers(truncate(word, r))
}

#[derive(Clone, Debug)]
pub struct ConeGrowthReport {
    pub counts: Vec<usize>,
    pub slope: f64,
    pub entropy: f64,
    /// `max_n #(C ∩ S_n) / e^{h n}` over the nonzero range.
    pub envelope_max: f64,
    pub envelope_min: f64,
    pub first_nonzero: usize,
}

/// Fits `ln #(C ∩ S_n)` against `n` over the spheres where the cone is
/// nonempty.
pub fn cone_growth_audit(
    ball: &CayleyBall,
    u: &CylinderUnion,
    r: usize,
    entropy: f64,
) -> Result<ConeGrowthReport, BoundaryError> {
    let c = cone(ball, &BoundarySet::Cylinders(u.clone()), r);
    let counts: Vec<usize> = (0..=ball.radius())
        .map(|m| ball.sphere(m).filter(|&g| c.contains(g)).count())
        .collect();
    let first = counts
        .iter()
        .position(|&x| x > 0)
        .ok_or(BoundaryError::EmptyCone)?;
    if counts[ball.radius()] == 0 {
        return Err(BoundaryError::EmptyCone);
    }
    let range: Vec<usize> = (first..=ball.radius()).collect();
    let pts: Vec<(f64, f64)> = range
        .iter()
        .map(|&m| (m as f64, (counts[m] as f64).ln()))
        .collect();
    let env: Vec<f64> = range
        .iter()
        .map(|&m| counts[m] as f64 / (entropy * m as f64).exp())
        .collect();
    Ok(ConeGrowthReport {
        slope: if pts.len() >= 2 {
            least_squares_slope(&pts)
        } else {
            f64::NAN
        },
        entropy,
        envelope_max: env.iter().cloned().fold(0.0, f64::max),
        envelope_min: env.iter().cloned().fold(f64::INFINITY, f64::min),
        first_nonzero: first,
        counts,
    })
}

/// The truncated cone `C_{B_r(ξ0)} \ B_n` with its sandwich radii.
#[derive(Clone, Debug)]
pub struct TruncatedCone {
    pub sites: SubsetHandle,
    pub n: usize,
    pub c: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Elements beyond `B_n` within `r/c` of `ξ0` lie in the cone, and cone
    /// elements beyond `B_n` lie within `c r`; checked over the ball.
    pub sandwich_holds: bool,
}

pub fn truncated_cone_neighborhood(
    ball: &CayleyBall,
    xi0: &BoundaryPoint,
    r: f64,
    metric: &VisualMetricParams,
) -> TruncatedCone {
    let group = ball.group();
    let rs = group.shadow_radius();
    let u = ball_at_infinity(group, xi0, r, metric);
    let n = ball_depth(r, metric) + rs;
    let full = cone(ball, &BoundarySet::Cylinders(u), rs);
    let sites = full.difference(&SubsetHandle::ball(ball, n));
    let c = (metric.epsilon * (rs + 1) as f64).exp();
    let (inner_radius, outer_radius) = (r / c, r * c);
    let xi = Point::Boundary(xi0.clone());
    let sandwich_holds = (ball.ball_size(n)..ball.len()).all(|g| {
        let d = match gromov_depth(group, &Point::Element(ball.word(g)), &xi) {
            Some(l) => (-metric.epsilon * l as f64).exp(),
            None => 0.0,
        };
        let inside = sites.contains(g);
        (d > inner_radius * (1.0 + 1e-12) || inside)
            && (!inside || d <= outer_radius * (1.0 + 1e-12))
    });
    TruncatedCone {
        sites,
        n,
        c,
        inner_radius,
        outer_radius,
        sandwich_holds,
    }
}

/// Boundary depths `ℓ(ξ, ξ0)` attained by rays `ξ` through `w`, up to
/// `max_depth`. Rays equal to `ξ0` are omitted.
fn reachable_depths(group: &GroupSpec, w: &[Gen], xi0: &BoundaryPoint, max_depth: usize) -> Vec<usize> {
    let c = (0..w.len()).take_while(|&i| w[i] == xi0.letter(i)).count();
    if c < w.len() {
        return vec![c + usize::from(group.same_clique(w[c], xi0.letter(c)))];
    }
    let mut out = Vec::new();
    for j in w.len()..=max_depth {
        let prev = (j > 0).then(|| xi0.letter(j - 1));
        let here = xi0.letter(j);
        for v in 0..group.num_generators() as Gen {
            if v != here && group.can_follow(prev, v) {
                let l = j + usize::from(group.same_clique(v, here));
                if l <= max_depth && !out.contains(&l) {
                    out.push(l);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug)]
pub struct SeparatingSet {
    pub sites: SubsetHandle,
    pub t: f64,
    pub n: usize,
    /// Depths `ℓ` with `r + t < e^{-εℓ} <= r + 3t`.
    pub annulus_depths: Vec<usize>,
    /// No boundary distance falls in the annulus, or `n` is past the ball.
    pub degenerate: bool,
}

/// `A_{r,t} = {g ∉ B_n : the shadow of g meets the annulus of width t
/// around the sphere of radius r + 2t about ξ0}`.
pub fn separating_set_with_width(
    ball: &CayleyBall,
    xi0: &BoundaryPoint,
    r: f64,
    t: f64,
    n: usize,
    metric: &VisualMetricParams,
) -> SeparatingSet {
    let group = ball.group();
    let rs = group.shadow_radius();
    let lo = r + t;
    let hi = r + 3.0 * t;
    let lmax = if lo >= 1.0 {
        0
    } else {
        ((1.0 / lo).ln() / metric.epsilon).ceil() as usize + 1
    };
    let annulus_depths: Vec<usize> = (0..=lmax)
        .filter(|&l| {
            let d = (-metric.epsilon * l as f64).exp();
            d > lo && d <= hi
        })
        .collect();
    let mut sites = SubsetHandle::empty(ball.len());
    let degenerate = annulus_depths.is_empty() || n >= ball.radius();
    if !degenerate {
        for g in ball.sphere(n + 1).start..ball.len() {
            let w = ball.word(g);
            let reach = reachable_depths(group, truncate(&w, rs), xi0, lmax);
            if reach.iter().any(|l| annulus_depths.contains(l)) {
                sites.insert(g);
            }
        }
    }
    SeparatingSet {
        sites,
        t,
        n,
        annulus_depths,
        degenerate,
    }
}

/// [`separating_set_with_width`] with `t = t_n` from the main-lemma
/// constants, `t_n = t_0 e^{-εn}`.
pub fn separating_set(
    ball: &CayleyBall,
    xi0: &BoundaryPoint,
    r: f64,
    n: usize,
    metric: &VisualMetricParams,
    t0: f64,
) -> SeparatingSet {
    let t = t0 * (-metric.epsilon * n as f64).exp();
    separating_set_with_width(ball, xi0, r, t, n, metric)
}

#[derive(Clone, Debug)]
pub struct SeparationCheck {
    pub intercepted: bool,
    /// A path avoiding the set, from the inner cone to outside the outer cone.
    pub witness: Option<Vec<usize>>,
    pub sources: usize,
    /// True when there is nothing to separate (no sources or no targets).
    pub vacuous: bool,
}

/// Exhaustive search for a path in `ball \ B_n` from `inner` to the
/// complement of `outer` that avoids `sep`.
pub fn verify_separation(
    ball: &CayleyBall,
    sep: &SubsetHandle,
    inner: &SubsetHandle,
    outer: &SubsetHandle,
    n: usize,
) -> SeparationCheck {
    let start = ball.sphere(n + 1).start;
    let open = |g: usize| g >= start && !sep.contains(g);
    let mut prev = vec![u32::MAX; ball.len()];
    let mut queue = VecDeque::new();
    let mut sources = 0;
    for g in inner.iter().filter(|&g| open(g)) {
        prev[g] = g as u32;
        queue.push_back(g);
        sources += 1;
    }
    let targets = (start..ball.len()).filter(|&g| !outer.contains(g)).count();
    while let Some(g) = queue.pop_front() {
        if !outer.contains(g) {
            let mut path = vec![g];
            let mut cur = g;
            while prev[cur] as usize != cur {
                cur = prev[cur] as usize;
                path.push(cur);
            }
            path.reverse();
            return SeparationCheck {
                intercepted: false,
                witness: Some(path),
                sources,
                vacuous: false,
            };
        }
        for &h in ball.neighbor_row(g) {
            if h != EXTERNAL && open(h as usize) && prev[h as usize] == u32::MAX {
                prev[h as usize] = g as u32;
                queue.push_back(h as usize);
            }
        }
    }
    SeparationCheck {
        intercepted: true,
        witness: None,
        sources,
        vacuous: sources == 0 || targets == 0,
    }
}
