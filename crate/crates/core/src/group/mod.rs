//! Group backends and word arithmetic.
//!
//! Two families are supported: free groups `F_k` and free products of finite
//! cyclic groups. For a free product the generating set is every nontrivial
//! element of every factor, so the Cayley graph is a tree of cliques, the
//! normal form is the syllable sequence and the word length is the number of
//! syllables. For orders 2 and 3 this is the usual symmetric generating set.

mod ball;
mod geodesic;
mod isoperimetry;
mod subset;

pub use ball::{sphere_sizes_exact, CayleyBall, DEFAULT_CAP, EXTERNAL};
pub(crate) use ball::least_squares_slope;
pub use geodesic::{distance, geodesic, geodesic_in_ball, thin_triangle_defect};
pub use isoperimetry::{isoperimetric_ratio, IsoperimetricAudit};
pub use subset::{
    boundary, boundary_in, boundary_out, connected_components, inner_set, outer_set, RimPolicy,
    SubsetHandle,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index into [`GroupSpec::generators`].
pub type Gen = u8;

/// Reduced word in normal form.
pub type Word = Vec<Gen>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("free group rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("free group rank {0} exceeds the supported maximum of 26")]
    RankTooLarge(usize),
    #[error("free product needs at least two factors, got {0}")]
    TooFewFactors(usize),
    #[error("factor order must be at least 2, got {0}")]
    OrderTooSmall(u32),
    #[error("Z/2 * Z/2 is virtually cyclic, not non-elementary hyperbolic")]
    Elementary,
    #[error("generating set of size {0} exceeds the supported maximum of 255")]
    TooManyGenerators(usize),
    #[error("ball of radius {radius} has {size} elements, above the cap of {cap}")]
    MemoryCap { radius: usize, size: u128, cap: u128 },
    #[error("site {site} has a neighbour outside the ball")]
    ExternalNeighbor { site: usize },
    #[error("word {0:?} is not in normal form")]
    NotReduced(Word),
    #[error("cannot parse word {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("subset size {got} does not match ball size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("word {0} lies outside the ball")]
    OutsideBall(String),
}

/// Which group a [`GroupSpec`] presents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Backend {
    Free { rank: usize },
    FreeProduct { orders: Vec<u32> },
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Free { rank } => write!(f, "F{rank}"),
            Backend::FreeProduct { orders } => {
                let parts: Vec<String> = orders.iter().map(|m| format!("Z{m}")).collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub inverse: Gen,
    /// Letter for free groups, factor for free products.
    pub factor: usize,
    /// Exponent inside the factor; `+1`/`-1` for free groups.
    pub exponent: i64,
}

/// A validated group together with its symmetric generating set.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    backend: Backend,
    generators: Vec<Generator>,
    /// `lookup[factor][exponent]` for free products.
    lookup: Vec<Vec<Gen>>,
    delta: f64,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.backend == other.backend
    }
}

impl GroupSpec {
    pub fn free(rank: usize) -> Result<Self, GroupError> {
        Self::new(Backend::Free { rank })
    }

    pub fn free_product(orders: &[u32]) -> Result<Self, GroupError> {
        Self::new(Backend::FreeProduct {
            orders: orders.to_vec(),
        })
    }

    pub fn new(backend: Backend) -> Result<Self, GroupError> {
        match &backend {
            Backend::Free { rank } => {
                let k = *rank;
                if k < 2 {
                    return Err(GroupError::RankTooSmall(k));
                }
                if k > 26 {
                    return Err(GroupError::RankTooLarge(k));
                }
                let mut generators = Vec::with_capacity(2 * k);
                for j in 0..k {
                    let c = (b'a' + j as u8) as char;
                    generators.push(Generator {
                        name: c.to_string(),
                        inverse: (2 * j + 1) as Gen,
                        factor: j,
                        exponent: 1,
                    });
                    generators.push(Generator {
                        name: c.to_ascii_uppercase().to_string(),
                        inverse: (2 * j) as Gen,
                        factor: j,
                        exponent: -1,
                    });
                }
                Ok(Self {
                    backend,
                    generators,
                    lookup: Vec::new(),
                    delta: 0.0,
                })
            }
            Backend::FreeProduct { orders } => {
                if orders.len() < 2 {
                    return Err(GroupError::TooFewFactors(orders.len()));
                }
                if orders.len() > 26 {
                    return Err(GroupError::TooManyGenerators(orders.len()));
                }
                if let Some(&m) = orders.iter().find(|&&m| m < 2) {
                    return Err(GroupError::OrderTooSmall(m));
                }
                if orders.len() == 2 && orders.iter().all(|&m| m == 2) {
                    return Err(GroupError::Elementary);
                }
                let total: usize = orders.iter().map(|&m| m as usize - 1).sum();
                if total > 255 {
                    return Err(GroupError::TooManyGenerators(total));
                }
                let mut generators = Vec::with_capacity(total);
                let mut lookup = Vec::with_capacity(orders.len());
                for (i, &m) in orders.iter().enumerate() {
                    let base = generators.len();
                    let mut row = vec![Gen::MAX; m as usize];
                    let c = (b'a' + i as u8) as char;
                    for e in 1..m {
                        let name = if e == 1 {
                            c.to_string()
                        } else {
                            format!("{c}{e}")
                        };
                        generators.push(Generator {
                            name,
                            inverse: (base + (m - e) as usize - 1) as Gen,
                            factor: i,
                            exponent: e as i64,
                        });
                        row[e as usize] = (base + e as usize - 1) as Gen;
                    }
                    lookup.push(row);
                }
                let delta = if orders.iter().all(|&m| m == 2) {
                    0.0
                } else {
                    1.0
                };
                Ok(Self {
                    backend,
                    generators,
                    lookup,
                    delta,
                })
            }
        }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `#S`.
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn inverse(&self, s: Gen) -> Gen {
        self.generators[s as usize].inverse
    }

    pub fn factor(&self, s: Gen) -> usize {
        self.generators[s as usize].factor
    }

    /// Hyperbolicity constant of the Cayley graph: 0 for trees, 1 for a tree
    /// of cliques with some clique of size at least 3.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The constant `δ + 1` used for visual-metric calibrations.
    pub fn delta_tilde(&self) -> f64 {
        self.delta + 1.0
    }

    pub fn is_tree(&self) -> bool {
        self.delta == 0.0
    }

    /// Shadow radius: 0 on trees, `2(δ+1)` otherwise.
    pub fn shadow_radius(&self) -> usize {
        if self.is_tree() {
            0
        } else {
            (2.0 * (self.delta + 1.0)) as usize
        }
    }

    /// Whether `s` may follow `prev` in a normal form.
    pub fn can_follow(&self, prev: Option<Gen>, s: Gen) -> bool {
        match prev {
            None => true,
            Some(p) => match self.backend {
                Backend::Free { .. } => self.inverse(p) != s,
                Backend::FreeProduct { .. } => self.factor(p) != self.factor(s),
            },
        }
    }

    /// Generators in the same clique as `s` (including `s`).
    pub fn clique_mates(&self, s: Gen) -> Vec<Gen> {
        match self.backend {
            Backend::Free { .. } => vec![s],
            Backend::FreeProduct { .. } => {
                let f = self.factor(s);
                self.lookup[f].iter().copied().filter(|&g| g != Gen::MAX).collect()
            }
        }
    }

    /// Whether `s` and `t` label edges in a common clique.
    pub fn same_clique(&self, s: Gen, t: Gen) -> bool {
        match self.backend {
            Backend::Free { .. } => s == t,
            Backend::FreeProduct { .. } => self.factor(s) == self.factor(t),
        }
    }

    /// Result of multiplying the last letter `p` by `s` on the right when
    /// `s` cannot follow `p`: `None` for cancellation, `Some(t)` for a merged
    /// syllable.
    pub fn combine(&self, p: Gen, s: Gen) -> Option<Gen> {
        match &self.backend {
            Backend::Free { .. } => {
                debug_assert_eq!(self.inverse(p), s);
                None
            }
            Backend::FreeProduct { orders } => {
                let f = self.factor(p);
                let m = orders[f] as i64;
                let e = (self.generators[p as usize].exponent + self.generators[s as usize].exponent)
                    % m;
                if e == 0 {
                    None
                } else {
                    Some(self.lookup[f][e as usize])
                }
            }
        }
    }

    /// Right-multiplies a normal form by one generator.
    pub fn push_gen(&self, word: &mut Word, s: Gen) {
        let last = word.last().copied();
        if self.can_follow(last, s) {
            word.push(s);
        } else {
            let p = word.pop().unwrap();
            if let Some(t) = self.combine(p, s) {
                word.push(t);
            }
        }
    }

    pub fn multiply(&self, a: &[Gen], b: &[Gen]) -> Word {
        let mut w = a.to_vec();
        for &s in b {
            self.push_gen(&mut w, s);
        }
        w
    }

    pub fn invert(&self, a: &[Gen]) -> Word {
        a.iter().rev().map(|&s| self.inverse(s)).collect()
    }

    pub fn is_reduced(&self, w: &[Gen]) -> bool {
        w.iter().all(|&s| (s as usize) < self.generators.len())
            && w.windows(2).all(|p| self.can_follow(Some(p[0]), p[1]))
    }

    /// Normal form of an arbitrary generator sequence.
    pub fn reduce(&self, w: &[Gen]) -> Word {
        self.multiply(&[], w)
    }

    /// Parses the textual word syntax: `aB` in free groups (upper case is the
    /// inverse), `ab2a` in free products (letter plus optional exponent).
    /// The empty string and `e` denote the identity. The result is reduced.
    pub fn parse_word(&self, text: &str) -> Result<Word, GroupError> {
        let t = text.trim();
        if t.is_empty() || t == "e" || t == "1" {
            return Ok(Vec::new());
        }
        let err = |reason: &str| GroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut raw = Vec::new();
        match &self.backend {
            Backend::Free { rank } => {
                for c in t.chars() {
                    if !c.is_ascii_alphabetic() {
                        return Err(err("expected letters"));
                    }
                    let j = (c.to_ascii_lowercase() as u8 - b'a') as usize;
                    if j >= *rank {
                        return Err(err("letter beyond the rank"));
                    }
                    raw.push((2 * j + usize::from(c.is_ascii_uppercase())) as Gen);
                }
            }
            Backend::FreeProduct { orders } => {
                let chars: Vec<char> = t.chars().collect();
                let mut i = 0;
                while i < chars.len() {
                    let c = chars[i];
                    if !c.is_ascii_lowercase() {
                        return Err(err("expected a lower-case factor letter"));
                    }
                    let f = (c as u8 - b'a') as usize;
                    if f >= orders.len() {
                        return Err(err("letter beyond the number of factors"));
                    }
                    i += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let e: u64 = if start == i {
                        1
                    } else {
                        chars[start..i]
                            .iter()
                            .collect::<String>()
                            .parse()
                            .map_err(|_| err("bad exponent"))?
                    };
                    let e = (e % orders[f] as u64) as usize;
                    if e != 0 {
                        raw.push(self.lookup[f][e]);
                    }
                }
            }
        }
        Ok(self.reduce(&raw))
    }

    pub fn format_word(&self, w: &[Gen]) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        w.iter()
            .map(|&s| self.generators[s as usize].name.as_str())
            .collect()
    }

    /// Volume entropy of the word metric: `ln(2k-1)` for `F_k`, and for a
    /// free product `-ln t0` where `t0` is the positive root of
    /// `sum_i (m_i-1) t / (1 + (m_i-1) t) = 1`.
    pub fn entropy_closed_form(&self) -> f64 {
        match &self.backend {
            Backend::Free { rank } => ((2 * rank - 1) as f64).ln(),
            Backend::FreeProduct { orders } => {
                let g = |t: f64| {
                    orders
                        .iter()
                        .map(|&m| {
                            let a = (m - 1) as f64;
                            a * t / (1.0 + a * t)
                        })
                        .sum::<f64>()
                        - 1.0
                };
                let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                while g(hi) < 0.0 {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                -(0.5 * (lo + hi)).ln()
            }
        }
    }
}

/// A group element in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub word: Word,
}

impl Element {
    pub fn identity() -> Self {
        Self { word: Vec::new() }
    }

    pub fn new(group: &GroupSpec, word: Word) -> Result<Self, GroupError> {
        if !group.is_reduced(&word) {
            return Err(GroupError::NotReduced(word));
        }
        Ok(Self { word })
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }
}
