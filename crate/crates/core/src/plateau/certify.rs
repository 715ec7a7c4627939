//! Cut-minimality of a partition on a window, by exhaustive search over the
//! free sites and by max-flow between the frozen inside and outside.

use super::{edge_cut, CutWindow, PlateauError, PlateauPartition};
use crate::exec::{self, Execution};
use crate::flow::FlowNetwork;
use crate::group::{CayleyBall, SubsetHandle, EXTERNAL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMode {
    Exhaustive,
    Oracle,
    Both,
    /// Both when the free sites fit the cap, the oracle alone otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub mode: CertMode,
    /// Largest `#Ω^in` for exhaustive enumeration.
    pub cap: usize,
    pub exec: Execution,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            mode: CertMode::Auto,
            cap: 20,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Minimal,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub window: String,
    /// The mode that actually ran.
    pub mode: CertMode,
    pub omega_size: usize,
    pub free_sites: usize,
    /// `b_Ω(D0)`.
    pub b_omega: usize,
    /// `b_Ω(D1)`.
    pub b_omega_d1: usize,
    /// Minimum of `b_Ω` over competitors.
    pub min: usize,
    pub exhaustive: Option<usize>,
    pub oracle: Option<usize>,
    /// Max-flow value with the roles of the phases swapped.
    pub oracle_d1: Option<usize>,
    pub candidates: u64,
    /// Free sites inside a minimising competitor, as words.
    pub witness: Vec<String>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn is_minimal(&self) -> bool {
        self.verdict == Verdict::Minimal
    }
}

struct Local {
    free: Vec<usize>,
    fixed_cut: usize,
    /// Cost of putting free site `i` inside / outside the competitor.
    cost_in: Vec<u32>,
    cost_out: Vec<u32>,
    /// Free neighbours of `i` with larger position.
    adj_hi: Vec<u32>,
}

fn window_edges(ball: &CayleyBall, omega: &SubsetHandle) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for g in omega.iter() {
        for &h in ball.neighbor_row(g) {
            if h != EXTERNAL && (h as usize) > g && omega.contains(h as usize) {
                e.push((g, h as usize));
            }
        }
    }
    e
}

fn local(ball: &CayleyBall, d0: &SubsetHandle, w: &CutWindow) -> Local {
    let free: Vec<usize> = w.omega_in.iter().collect();
    let k = free.len();
    let pos = |g: usize| free.binary_search(&g).ok();
    let mut l = Local {
        fixed_cut: 0,
        cost_in: vec![0; k],
        cost_out: vec![0; k],
        adj_hi: vec![0; k],
        free: free.clone(),
    };
    for (g, h) in window_edges(ball, &w.omega) {
        match (pos(g), pos(h)) {
            (None, None) => l.fixed_cut += usize::from(d0.contains(g) != d0.contains(h)),
            (Some(i), None) | (None, Some(i)) => {
                let other = if pos(g).is_some() { h } else { g };
                if d0.contains(other) {
                    l.cost_out[i] += 1;
                } else {
                    l.cost_in[i] += 1;
                }
            }
            (Some(i), Some(j)) => l.adj_hi[i.min(j)] |= 1 << i.max(j),
        }
    }
    l
}

impl Local {
    fn cut(&self, mask: u32) -> usize {
        let mut c = self.fixed_cut as u32;
        for i in 0..self.free.len() {
            if mask >> i & 1 == 1 {
                c += self.cost_in[i] + (self.adj_hi[i] & !mask).count_ones();
            } else {
                c += self.cost_out[i] + (self.adj_hi[i] & mask).count_ones();
            }
        }
        c as usize
    }
}

const CHUNK_BITS: u32 = 12;

/// Minimum over all `2^k` masks and the smallest minimising mask.
fn exhaustive_min(l: &Local, exec: Execution) -> (usize, u32) {
    let k = l.free.len() as u32;
    let total: u64 = 1 << k;
    let chunk: u64 = 1 << CHUNK_BITS.min(k);
    let chunks = (total / chunk) as usize;
    let best = exec::map_range(exec, chunks, |c| {
        let lo = c as u64 * chunk;
        let mut best = (usize::MAX, 0u32);
        for m in lo..lo + chunk {
            let v = l.cut(m as u32);
            if v < best.0 {
                best = (v, m as u32);
            }
        }
        best
    });
    best.into_iter().min().unwrap()
}

/// Max-flow between the fixed sites of `inside` (contracted to the source)
/// and the other fixed sites of `Ω` (contracted to the sink).
fn oracle_value(ball: &CayleyBall, inside: &SubsetHandle, w: &CutWindow) -> usize {
    let free: Vec<usize> = w.omega_in.iter().collect();
    let node = |g: usize| match free.binary_search(&g) {
        Ok(i) => 2 + i,
        Err(_) => usize::from(!inside.contains(g)),
    };
    let mut net = FlowNetwork::new(2 + free.len());
    for (g, h) in window_edges(ball, &w.omega) {
        let (u, v) = (node(g), node(h));
        if u != v {
            net.add_edge(u, v, 1);
        }
    }
    net.max_flow(0, 1) as usize
}

/// Certifies `b_Ω(D0) <= b_Ω(B̃)` for every `B̃` agreeing with `D0` off `Ω^in`.
pub fn plateau_certify(
    partition: &PlateauPartition,
    window: &CutWindow,
    cfg: &CertifyConfig,
) -> Result<Certificate, PlateauError> {
    let ball = &partition.ball;
    let d0 = &partition.d0;
    if window.omega.capacity() != ball.len() {
        return Err(PlateauError::WindowOutsideBall(window.label.clone()));
    }
    let k = window.omega_in.count();
    let fits = k <= cfg.cap && k < 32;
    let mode = match cfg.mode {
        CertMode::Auto if fits => CertMode::Both,
        CertMode::Auto => CertMode::Oracle,
        CertMode::Exhaustive | CertMode::Both if !fits => {
            return Err(PlateauError::CapExceeded { got: k, cap: cfg.cap })
        }
        m => m,
    };
    let b_omega = edge_cut(ball, d0, window);
    let b_omega_d1 = edge_cut(ball, &partition.d1, window);
    let mut exhaustive = None;
    let mut candidates = 0;
    let mut witness_set = window.omega_in.intersection(d0);
    if matches!(mode, CertMode::Exhaustive | CertMode::Both) {
        let l = local(ball, d0, window);
        let (min, mask) = exhaustive_min(&l, cfg.exec);
        exhaustive = Some(min);
        candidates = 1u64 << k;
        witness_set = SubsetHandle::from_indices(
            ball.len(),
            l.free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &g)| g),
        );
    }
    let (oracle, oracle_d1) = if matches!(mode, CertMode::Oracle | CertMode::Both) {
        (
            Some(oracle_value(ball, d0, window)),
            Some(oracle_value(ball, &partition.d1, window)),
        )
    } else {
        (None, None)
    };
    if let (Some(e), Some(o)) = (exhaustive, oracle) {
        if e != o {
            return Err(PlateauError::OracleDisagreement { exhaustive: e, oracle: o });
        }
    }
    let min = exhaustive.or(oracle).unwrap();
    let verdict = if b_omega <= min {
        Verdict::Minimal
    } else {
        Verdict::Counterexample
    };
    Ok(Certificate {
        window: window.label.clone(),
        mode,
        omega_size: window.omega.count(),
        free_sites: k,
        b_omega,
        b_omega_d1,
        min,
        exhaustive,
        oracle,
        oracle_d1,
        candidates,
        witness: witness_set.iter().map(|g| ball.word_string(g)).collect(),
        verdict,
    })
}

/// [`plateau_certify`] over every window, in parallel over windows.
pub fn certify_all(
    partition: &PlateauPartition,
    windows: &[CutWindow],
    cfg: &CertifyConfig,
) -> Result<Vec<Certificate>, PlateauError> {
    exec::map_slice(cfg.exec, windows, |w| plateau_certify(partition, w, cfg))
        .into_iter()
        .collect()
}
