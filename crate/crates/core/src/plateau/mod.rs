//! The small-coupling limit of Dirichlet solutions as a minimal edge cut.
//!
//! A [`PlateauPartition`] is a two-phase split of a finite ball; its
//! minimality is certified on finite windows `Ω` against every competitor
//! that agrees with it outside `Ω^in`, both by exhaustive enumeration and by
//! a max-flow min-cut oracle.

mod audits;
mod certify;
mod sweep;

pub use audits::{
    infinite_components_audit, separation_audit, ComponentsReport, SeparationReport,
};
pub use certify::{
    certify_all, plateau_certify, CertMode, Certificate, CertifyConfig, Verdict,
};
pub use sweep::{
    condition1, default_ladder, ladder_admissible, rho_sweep, Condition1, LadderConfig, Rung,
    SweepReport,
};

use crate::ac::{action_on_window, AcError, Potential};
use crate::dirichlet::DirichletError;
use crate::group::{inner_set, CayleyBall, GroupError, SubsetHandle, EXTERNAL};
use crate::phases::PhasePartition;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlateauError {
    #[error("window has {got} free sites, above the exhaustive cap {cap}")]
    CapExceeded { got: usize, cap: usize },
    #[error("exhaustive minimum {exhaustive} differs from max-flow value {oracle}")]
    OracleDisagreement { exhaustive: usize, oracle: usize },
    #[error("labels on B_{m} differ between the last two rungs at {sites:?}")]
    NotStabilized { m: usize, sites: Vec<String> },
    #[error("rung {rung}: separation inequality fails ({lhs} >= {rhs})")]
    Condition1 { rung: usize, lhs: f64, rhs: f64 },
    #[error("rung {rung}: {count} sites lie in neither phase band")]
    MiddleBand { rung: usize, count: usize },
    #[error("partition does not cover the ball")]
    NotCovering,
    #[error("ladder must be nonempty, positive and strictly decreasing")]
    BadLadder,
    #[error("bad window spec `{0}`")]
    BadWindowSpec(String),
    #[error("window does not fit the ball: {0}")]
    WindowOutsideBall(String),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ac(#[from] AcError),
}

/// A covering split `D0 ⊔ D1` of a ball with its transition set
/// `T = ∂^out D0 ∪ ∂^out D1`.
#[derive(Clone, Debug)]
pub struct PlateauPartition {
    pub ball: CayleyBall,
    pub d0: SubsetHandle,
    pub d1: SubsetHandle,
    pub transition: SubsetHandle,
    /// Coupling ladder of the source fields; empty for constructed partitions.
    pub ladder: Vec<f64>,
}

impl PlateauPartition {
    pub fn from_d0(ball: CayleyBall, d0: SubsetHandle) -> Self {
        let p = PhasePartition::from_d0(d0);
        let transition = p.transition_sites(&ball);
        Self {
            d1: p.d1,
            d0: p.d0,
            transition,
            ball,
            ladder: Vec::new(),
        }
    }

    /// From a band classification with no middle-band sites.
    pub fn from_phases(ball: CayleyBall, p: &PhasePartition) -> Result<Self, PlateauError> {
        if !p.is_clean() || p.d0.union(&p.d1).count() != ball.len() {
            return Err(PlateauError::NotCovering);
        }
        Ok(Self::from_d0(ball, p.d0.clone()))
    }

    /// Unordered crossing edges `(g, h)`, `g < h`.
    pub fn cut_edges(&self) -> Vec<(usize, usize)> {
        PhasePartition::from_d0(self.d0.clone()).crossing_edges(&self.ball)
    }

    /// `c0` on `D0` and `c1` on `D1`.
    pub fn two_valued(&self, pot: &dyn Potential) -> Vec<f64> {
        let (c0, c1) = pot.wells();
        (0..self.ball.len())
            .map(|g| if self.d0.contains(g) { c0 } else { c1 })
            .collect()
    }

    /// `element index, word, phase` rows.
    pub fn label_csv(&self) -> String {
        let mut s = String::from("index,word,phase\n");
        for g in 0..self.ball.len() {
            let phase = usize::from(!self.d0.contains(g));
            s.push_str(&format!("{g},{},{phase}\n", self.ball.word_string(g)));
        }
        s
    }

    pub fn cut_csv(&self) -> String {
        let mut s = String::from("g,h,g_word,h_word\n");
        for (g, h) in self.cut_edges() {
            s.push_str(&format!(
                "{g},{h},{},{}\n",
                self.ball.word_string(g),
                self.ball.word_string(h)
            ));
        }
        s
    }

    /// Reads a label CSV written by [`label_csv`](Self::label_csv) onto `ball`.
    pub fn parse_label_csv(ball: CayleyBall, text: &str) -> Result<Self, PlateauError> {
        let bad = |l: &str| PlateauError::BadWindowSpec(format!("label row `{l}`"));
        let mut d0 = SubsetHandle::empty(ball.len());
        let mut seen = 0;
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(bad(line));
            }
            let g: usize = cols[0].parse().map_err(|_| bad(line))?;
            if g >= ball.len() || ball.word_string(g) != cols[1] {
                return Err(bad(line));
            }
            match cols[2] {
                "0" => d0.insert(g),
                "1" => {}
                _ => return Err(bad(line)),
            }
            seen += 1;
        }
        if seen != ball.len() {
            return Err(PlateauError::NotCovering);
        }
        Ok(Self::from_d0(ball, d0))
    }
}

/// A finite window `Ω` of a ball and its inner set, the free sites of a
/// competitor.
#[derive(Clone, Debug, PartialEq)]
pub struct CutWindow {
    pub omega: SubsetHandle,
    pub omega_in: SubsetHandle,
    pub label: String,
}

impl CutWindow {
    pub fn new(ball: &CayleyBall, omega: SubsetHandle, label: impl Into<String>) -> Result<Self, PlateauError> {
        let omega_in = inner_set(ball, &omega)?;
        Ok(Self {
            omega,
            omega_in,
            label: label.into(),
        })
    }

    pub fn ball_window(ball: &CayleyBall, m: usize) -> Result<Self, PlateauError> {
        if m > ball.radius() {
            return Err(PlateauError::WindowOutsideBall(format!("B_{m}")));
        }
        Self::new(ball, SubsetHandle::ball(ball, m), format!("B{m}"))
    }

    pub fn free_sites(&self) -> &SubsetHandle {
        &self.omega_in
    }
}

/// `b_Ω(B) = #{(g, gs) ∈ Ω×Ω : g ∈ B, gs ∉ B}`.
pub fn edge_cut(ball: &CayleyBall, b: &SubsetHandle, window: &CutWindow) -> usize {
    let omega = &window.omega;
    omega
        .iter()
        .filter(|&g| b.contains(g))
        .map(|g| {
            ball.neighbor_row(g)
                .iter()
                .filter(|&&h| h != EXTERNAL && omega.contains(h as usize) && !b.contains(h as usize))
                .count()
        })
        .sum()
}

/// `W_Ω` of the two-valued field of `b` and the predicted value
/// `(ρ/2)(c1-c0)² b_Ω(D0)`.
pub fn action_bridge(partition: &PlateauPartition, window: &CutWindow, pot: &dyn Potential, rho: f64) -> (f64, f64) {
    let y = partition.two_valued(pot);
    let w = action_on_window(&partition.ball, pot, &y, rho, &window.omega);
    let (c0, c1) = pot.wells();
    let b = edge_cut(&partition.ball, &partition.d0, window);
    (w, 0.5 * rho * (c1 - c0).powi(2) * b as f64)
}

/// A connected window of `size` sites inside `B_radius`, grown from a random
/// start by random frontier picks.
pub fn random_connected_window(
    ball: &CayleyBall,
    radius: usize,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> SubsetHandle {
    let k = ball.ball_size(radius);
    let mut omega = SubsetHandle::empty(ball.len());
    let start = rng.gen_range(0..k);
    omega.insert(start);
    let mut frontier: Vec<usize> = vec![start];
    let mut count = 1;
    while count < size.min(k) {
        let cand: Vec<usize> = frontier
            .iter()
            .flat_map(|&g| ball.neighbor_row(g).iter().copied())
            .filter(|&h| h != EXTERNAL && (h as usize) < k && !omega.contains(h as usize))
            .map(|h| h as usize)
            .collect();
        let Some(&h) = cand.choose(rng) else {
            break;
        };
        omega.insert(h);
        frontier.push(h);
        count += 1;
    }
    omega
}

/// Which windows to certify: `B_m` for `m <= max_ball` and `random`
/// connected windows inside `B_random_radius`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub max_ball: usize,
    pub random: usize,
    pub random_radius: usize,
    /// Window sizes are drawn from `min_size..=max_size`.
    pub min_size: usize,
    pub max_size: usize,
    pub seed: u64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            max_ball: 5,
            random: 100,
            random_radius: 3,
            min_size: 8,
            max_size: 40,
            seed: 11,
        }
    }
}

impl WindowSpec {
    pub fn windows(&self, ball: &CayleyBall) -> Result<Vec<CutWindow>, PlateauError> {
        if self.max_ball > ball.radius() || self.random_radius > ball.radius() {
            return Err(PlateauError::WindowOutsideBall(format!(
                "window radius above ball radius {}",
                ball.radius()
            )));
        }
        let mut out = (0..=self.max_ball)
            .map(|m| CutWindow::ball_window(ball, m))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for i in 0..self.random {
            let size = rng.gen_range(self.min_size..=self.max_size.max(self.min_size));
            let omega = random_connected_window(ball, self.random_radius, size, &mut rng);
            out.push(CutWindow::new(ball, omega, format!("random{i}"))?);
        }
        Ok(out)
    }
}

/// `ball:M`, `random:COUNT:RADIUS:SEED` or `balls:M+random:COUNT:RADIUS:SEED`.
impl FromStr for WindowSpec {
    type Err = PlateauError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PlateauError::BadWindowSpec(s.to_string());
        let mut spec = WindowSpec {
            max_ball: 0,
            random: 0,
            random_radius: 0,
            ..Default::default()
        };
        let mut any_ball = false;
        for part in s.split('+') {
            let f: Vec<&str> = part.trim().split(':').collect();
            let num = |i: usize| f.get(i).and_then(|x| x.parse::<u64>().ok()).ok_or_else(bad);
            match f[0] {
                "ball" | "balls" if f.len() == 2 => {
                    spec.max_ball = num(1)? as usize;
                    any_ball = true;
                }
                "random" if f.len() == 4 => {
                    spec.random = num(1)? as usize;
                    spec.random_radius = num(2)? as usize;
                    spec.seed = num(3)?;
                }
                _ => return Err(bad()),
            }
        }
        if !any_ball && spec.random == 0 {
            return Err(bad());
        }
        Ok(spec)
    }
}
