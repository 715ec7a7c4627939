//! The boundary at infinity: rays, cylinder sets, the visual metric, shadows,
//! cones and Patterson–Sullivan weights.

mod cone;
mod constants;
mod cylinder;
mod measure;

pub use cone::{
    cone, cone_growth_audit, covered_sites, in_cone, separating_set, separating_set_with_width,
    truncated_cone_neighborhood, verify_separation, ConeGrowthReport, SeparatingSet,
    SeparationCheck, TruncatedCone,
};
pub use constants::{CalibrationConfig, Constant, ConstantsReport, Provenance};
pub use cylinder::{ball_at_infinity, ball_depth, BoundarySet, BoundarySpec, CylinderUnion};
pub use measure::{
    continuation_counts, cylinder_measure, ps_weight, shadow_tail_weight, shadow_tail_slope,
};

use crate::group::{Gen, GroupError, GroupSpec, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("boundary ray is not reduced at the seam")]
    NotReduced,
    #[error("boundary ray needs a nonempty period")]
    EmptyPeriod,
    #[error("cannot parse boundary point {0:?}; expected e.g. \"a(b)\"")]
    Parse(String),
    #[error("D0 is empty")]
    EmptyPhase0,
    #[error("D0 is the whole boundary, so D1 is empty")]
    EmptyPhase1,
    #[error("dimension D = {0} must exceed 1/4")]
    DimensionTooSmall(f64),
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("Patterson-Sullivan exponent s = {s} must exceed the entropy h = {h}")]
    ExponentTooSmall { s: f64, h: f64 },
    #[error("cone is empty before the ball radius")]
    EmptyCone,
}

/// An eventually periodic geodesic ray `preperiod · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub preperiod: Word,
    pub period: Word,
}

impl BoundaryPoint {
    pub fn new(group: &GroupSpec, preperiod: Word, period: Word) -> Result<Self, BoundaryError> {
        if period.is_empty() {
            return Err(BoundaryError::EmptyPeriod);
        }
        let mut probe = preperiod.clone();
        probe.extend_from_slice(&period);
        probe.extend_from_slice(&period);
        if !group.is_reduced(&probe) {
            return Err(BoundaryError::NotReduced);
        }
        Ok(Self { preperiod, period })
    }

    /// Parses `pre(period)`, e.g. `a(b)` for `abbb...` or `(ab)` for `abab...`.
    pub fn parse(group: &GroupSpec, text: &str) -> Result<Self, BoundaryError> {
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| BoundaryError::Parse(text.into()))?;
        if !t.ends_with(')') {
            return Err(BoundaryError::Parse(text.into()));
        }
        let pre = group.parse_word(&t[..open])?;
        let per = group.parse_word(&t[open + 1..t.len() - 1])?;
        Self::new(group, pre, per)
    }

    pub fn format(&self, group: &GroupSpec) -> String {
        let pre = if self.preperiod.is_empty() {
            String::new()
        } else {
            group.format_word(&self.preperiod)
        };
        format!("{pre}({})", group.format_word(&self.period))
    }

    #[inline]
    pub fn letter(&self, i: usize) -> Gen {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// First `n` letters of the ray.
    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.letter(i)).collect()
    }
}

/// A point of the compactification `G ∪ ∂G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Element(Word),
    Boundary(BoundaryPoint),
}

impl Point {
    fn letter(&self, i: usize) -> Option<Gen> {
        match self {
            Point::Element(w) => w.get(i).copied(),
            Point::Boundary(b) => Some(b.letter(i)),
        }
    }

    fn horizon(&self) -> Option<(usize, usize)> {
        match self {
            Point::Element(_) => None,
            Point::Boundary(b) => Some((b.preperiod.len(), b.period.len())),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Depth `ℓ(x, y)` of the geodesic between two points, measured from the
/// identity; `None` when `x = y`.
///
/// On trees this is the common prefix length. In a tree of cliques the
/// geodesic also runs through the clique where the two rays part, which adds
/// one when the first differing syllables share a factor.
pub fn gromov_depth(group: &GroupSpec, x: &Point, y: &Point) -> Option<usize> {
    let limit = match (x, y) {
        (Point::Element(a), Point::Element(b)) => {
            if a == b {
                return None;
            }
            a.len().min(b.len())
        }
        (Point::Element(a), _) | (_, Point::Element(a)) => a.len(),
        _ => {
            let (p1, q1) = x.horizon().unwrap();
            let (p2, q2) = y.horizon().unwrap();
            p1.max(p2) + q1 / gcd(q1, q2) * q2
        }
    };
    let mut c = 0;
    while c < limit && x.letter(c) == y.letter(c) {
        c += 1;
    }
    if c == limit && matches!((x, y), (Point::Boundary(_), Point::Boundary(_))) {
        return None;
    }
    let bump = match (x.letter(c), y.letter(c)) {
        (Some(s), Some(t)) => usize::from(group.same_clique(s, t)),
        _ => 0,
    };
    Some(c + bump)
}

/// Parameters of the visual metric `e^{-ε ℓ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisualMetricParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub dimension: f64,
}

impl VisualMetricParams {
    pub fn new(entropy: f64, epsilon: f64) -> Result<Self, BoundaryError> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(BoundaryError::BadEpsilon(epsilon));
        }
        let dimension = entropy / epsilon;
        if dimension <= 0.25 {
            return Err(BoundaryError::DimensionTooSmall(dimension));
        }
        Ok(Self {
            epsilon,
            lambda: 1.0,
            dimension,
        })
    }

    /// `ε = h/2`, so `D = 2`.
    pub fn default_for(group: &GroupSpec) -> Self {
        Self::new(group.entropy_closed_form(), group.entropy_closed_form() / 2.0).unwrap()
    }
}

/// `e^{-ε ℓ(x,y)}`, and 0 iff `x = y`. The metric is an ultrametric on both
/// backends.
pub fn visual_distance(group: &GroupSpec, x: &Point, y: &Point, p: &VisualMetricParams) -> f64 {
    match gromov_depth(group, x, y) {
        None => 0.0,
        Some(l) => (-p.epsilon * l as f64).exp(),
    }
}

/// Drops the last `r` letters.
pub fn truncate(word: &[Gen], r: usize) -> &[Gen] {
    &word[..word.len().saturating_sub(r)]
}

/// The `R`-shadow of `g` as a cylinder set: rays through `g` truncated by `R`.
pub fn shadow(group: &GroupSpec, g: &[Gen], r: usize) -> CylinderUnion {
    CylinderUnion::new(group, vec![truncate(g, r).to_vec()]).unwrap()
}

/// Whether the ray to `ξ` passes within `R` of `g`.
pub fn shadow_membership(xi: &BoundaryPoint, g: &[Gen], r: usize) -> bool {
    truncate(g, r)
        .iter()
        .enumerate()
        .all(|(i, &s)| xi.letter(i) == s)
}
