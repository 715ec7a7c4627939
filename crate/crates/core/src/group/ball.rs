//! Finite balls of the Cayley graph, enumerated sphere by sphere.

use super::{Backend, Gen, GroupError, GroupSpec, Word};
use crate::digest::sha256_hex;
use serde_json::json;
use std::io::Write;
use std::ops::Range;

/// Adjacency entry for a neighbour outside the ball.
pub const EXTERNAL: u32 = u32::MAX;

/// Default cap on the number of stored elements.
pub const DEFAULT_CAP: u128 = 20_000_000;

/// Exact sizes `#S_0, ..., #S_n` of the spheres of the infinite group,
/// saturating at `u128::MAX`.
pub fn sphere_sizes_exact(group: &GroupSpec, n: usize) -> Vec<u128> {
    let ns = group.num_generators();
    // cont[s] = number of normal forms of length j that may follow s.
    let mut cont = vec![1u128; ns];
    let mut out = vec![1u128];
    for _ in 0..n {
        out.push(cont.iter().fold(0u128, |a, &c| a.saturating_add(c)));
        let next: Vec<u128> = (0..ns)
            .map(|s| {
                (0..ns)
                    .filter(|&t| group.can_follow(Some(s as Gen), t as Gen))
                    .fold(0u128, |a, t| a.saturating_add(cont[t]))
            })
            .collect();
        cont = next;
    }
    out
}

/// The ball `B_n` of the Cayley graph with a flattened neighbour table.
///
/// Elements are numbered breadth first, so sphere `m` is a contiguous index
/// range and the identity is element 0. Words are recovered through the
/// parent chain.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    group: GroupSpec,
    radius: usize,
    parent: Vec<u32>,
    last: Vec<Gen>,
    length: Vec<u16>,
    adjacency: Vec<u32>,
    sphere_offsets: Vec<usize>,
}

impl CayleyBall {
    pub fn build(group: &GroupSpec, radius: usize) -> Result<Self, GroupError> {
        Self::build_with_cap(group, radius, DEFAULT_CAP)
    }

    pub fn build_with_cap(group: &GroupSpec, radius: usize, cap: u128) -> Result<Self, GroupError> {
        let sizes = sphere_sizes_exact(group, radius);
        let total = sizes.iter().fold(0u128, |a, &c| a.saturating_add(c));
        if total > cap || total >= EXTERNAL as u128 {
            return Err(GroupError::MemoryCap {
                radius,
                size: total,
                cap,
            });
        }
        let n = total as usize;
        let ns = group.num_generators();
        let mut parent = Vec::with_capacity(n);
        let mut last = Vec::with_capacity(n);
        let mut length = Vec::with_capacity(n);
        let mut adjacency = vec![EXTERNAL; n * ns];
        let mut sphere_offsets = vec![0usize, 1];
        parent.push(EXTERNAL);
        last.push(Gen::MAX);
        length.push(0u16);
        for m in 0..radius {
            let range = sphere_offsets[m]..sphere_offsets[m + 1];
            for g in range {
                let prev = if m == 0 { None } else { Some(last[g]) };
                for s in 0..ns as Gen {
                    if group.can_follow(prev, s) {
                        let child = parent.len() as u32;
                        parent.push(g as u32);
                        last.push(s);
                        length.push((m + 1) as u16);
                        adjacency[g * ns + s as usize] = child;
                    }
                }
            }
            sphere_offsets.push(parent.len());
        }
        debug_assert_eq!(parent.len(), n);
        // Reductions: the neighbour g*s is either the parent or a sibling.
        for g in 1..n {
            let p = parent[g] as usize;
            let l = last[g];
            for s in 0..ns as Gen {
                if group.can_follow(Some(l), s) {
                    continue;
                }
                adjacency[g * ns + s as usize] = match group.combine(l, s) {
                    None => p as u32,
                    Some(t) => adjacency[p * ns + t as usize],
                };
            }
        }
        Ok(Self {
            group: group.clone(),
            radius,
            parent,
            last,
            length,
            adjacency,
            sphere_offsets,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn num_generators(&self) -> usize {
        self.group.num_generators()
    }

    /// Word length of element `g`.
    pub fn length(&self, g: usize) -> usize {
        self.length[g] as usize
    }

    pub fn parent(&self, g: usize) -> Option<usize> {
        (g != 0).then(|| self.parent[g] as usize)
    }

    pub fn last_letter(&self, g: usize) -> Option<Gen> {
        (g != 0).then(|| self.last[g])
    }

    /// Index of `g * s`, or `None` if it lies outside the ball.
    #[inline]
    pub fn neighbor(&self, g: usize, s: usize) -> Option<usize> {
        let v = self.adjacency[g * self.group.num_generators() + s];
        (v != EXTERNAL).then_some(v as usize)
    }

    /// Raw neighbour row of `g`, with [`EXTERNAL`] for missing neighbours.
    #[inline]
    pub fn neighbor_row(&self, g: usize) -> &[u32] {
        let ns = self.group.num_generators();
        &self.adjacency[g * ns..(g + 1) * ns]
    }

    /// Whether `g` has a neighbour outside the ball (true exactly on the rim).
    pub fn is_rim(&self, g: usize) -> bool {
        self.neighbor_row(g).contains(&EXTERNAL)
    }

    pub fn sphere(&self, m: usize) -> Range<usize> {
        if m > self.radius {
            return self.len()..self.len();
        }
        self.sphere_offsets[m]..self.sphere_offsets[m + 1]
    }

    /// Index range of `B_m` for `m <= radius`.
    pub fn ball_range(&self, m: usize) -> Range<usize> {
        0..self.sphere_offsets[m.min(self.radius) + 1]
    }

    pub fn sphere_size(&self, m: usize) -> usize {
        self.sphere(m).len()
    }

    pub fn ball_size(&self, m: usize) -> usize {
        self.ball_range(m).len()
    }

    pub fn word(&self, g: usize) -> Word {
        let mut w = Vec::with_capacity(self.length(g));
        let mut cur = g;
        while cur != 0 {
            w.push(self.last[cur]);
            cur = self.parent[cur] as usize;
        }
        w.reverse();
        w
    }

    pub fn word_string(&self, g: usize) -> String {
        self.group.format_word(&self.word(g))
    }

    /// Ancestor of `g` at word length `depth <= |g|`.
    pub fn ancestor(&self, g: usize, depth: usize) -> usize {
        let mut cur = g;
        for _ in depth..self.length(g) {
            cur = self.parent[cur] as usize;
        }
        cur
    }

    /// Index of the element represented by a normal form.
    pub fn index_of(&self, word: &[Gen]) -> Option<usize> {
        if word.len() > self.radius || !self.group.is_reduced(word) {
            return None;
        }
        let mut cur = 0usize;
        for &s in word {
            cur = self.neighbor(cur, s as usize)?;
        }
        Some(cur)
    }

    /// Index of the product of element `g` with the word `w` on the right.
    pub fn translate(&self, g: usize, w: &[Gen]) -> Option<usize> {
        let target = self.group.multiply(&self.word(g), w);
        self.index_of(&target)
    }

    /// Least-squares slope of `ln #B_m` over `m = 1..=n`.
    pub fn entropy_estimate(&self, n: usize) -> f64 {
        let n = n.min(self.radius);
        let pts: Vec<(f64, f64)> = (1..=n)
            .map(|m| (m as f64, (self.ball_size(m) as f64).ln()))
            .collect();
        least_squares_slope(&pts)
    }

    /// Identity hash of the enumeration: backend, radius and size.
    pub fn hash(&self) -> String {
        let desc = json!({
            "backend": self.group.backend(),
            "radius": self.radius,
            "size": self.len(),
        });
        sha256_hex(desc.to_string().as_bytes())
    }

    pub fn metadata(&self) -> serde_json::Value {
        let spheres: Vec<usize> = (0..=self.radius).map(|m| self.sphere_size(m)).collect();
        let gens: Vec<&str> = self
            .group
            .generators()
            .iter()
            .map(|g| g.name.as_str())
            .collect();
        json!({
            "backend": self.group.backend(),
            "group": self.group.backend().to_string(),
            "generators": gens,
            "radius": self.radius,
            "size": self.len(),
            "sphere_sizes": spheres,
            "hash": self.hash(),
        })
    }

    /// Writes each undirected edge once as `i j generator`.
    pub fn write_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let ns = self.num_generators();
        for g in 0..self.len() {
            for s in 0..ns {
                if let Some(h) = self.neighbor(g, s) {
                    if g < h {
                        writeln!(out, "{g} {h} {}", self.group.generators()[s].name)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Graphviz rendering of `B_r` for `r <= max_radius`.
    pub fn write_dot<W: Write>(&self, mut out: W, max_radius: usize) -> std::io::Result<()> {
        let r = max_radius.min(self.radius);
        let end = self.ball_size(r);
        writeln!(out, "graph cayley {{")?;
        writeln!(out, "  node [shape=point];")?;
        for g in 0..end {
            writeln!(out, "  n{g} [label=\"{}\"];", self.word_string(g))?;
        }
        for g in 0..end {
            for s in 0..self.num_generators() {
                if let Some(h) = self.neighbor(g, s) {
                    if g < h && h < end {
                        writeln!(out, "  n{g} -- n{h};")?;
                    }
                }
            }
        }
        writeln!(out, "}}")
    }

    pub fn backend(&self) -> &Backend {
        self.group.backend()
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
