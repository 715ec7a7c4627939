//! Dinic max-flow on small undirected integer-capacity graphs.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u64,
}

#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Undirected edge of capacity `cap` in both directions.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: u64) {
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap });
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    q.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: u64, level: &[usize], it: &mut [usize]) -> u64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let d = self.augment(to, t, pushed.min(cap), level, it);
                if d > 0 {
                    self.arcs[a].cap -= d;
                    self.arcs[a ^ 1].cap += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0
    }

    /// Value of a maximum `s`-`t` flow; the network keeps the residual
    /// capacities afterwards.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = vec![0; self.len()];
            loop {
                let f = self.augment(s, t, u64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network: the smallest source
    /// side among all minimum cuts. Call after [`max_flow`](Self::max_flow).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l != usize::MAX).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cuts() {
        // Path s - a - b - t with a double edge in the middle.
        let mut n = FlowNetwork::new(4);
        n.add_edge(0, 1, 1);
        n.add_edge(1, 2, 2);
        n.add_edge(2, 3, 1);
        assert_eq!(n.max_flow(0, 3), 1);
        assert_eq!(n.source_side(0), vec![true, false, false, false]);
        // Two disjoint routes.
        let mut n = FlowNetwork::new(4);
        n.add_edge(0, 1, 1);
        n.add_edge(0, 2, 1);
        n.add_edge(1, 3, 1);
        n.add_edge(2, 3, 1);
        n.add_edge(1, 2, 5);
        assert_eq!(n.max_flow(0, 3), 2);
        let mut n = FlowNetwork::new(2);
        assert_eq!(n.max_flow(0, 1), 0);
    }
}
