//! Edge and node connectivity by unit-capacity max flow.

use super::{AnalysisError, Result};
use crate::graph::UndirectedGraph;
use std::collections::VecDeque;

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Dinic's algorithm, stopping once `limit` units are routed.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let n = self.head.len();
        let mut flow = 0;
        while flow < limit {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                break;
            }
            let mut it = vec![0usize; n];
            while flow < limit {
                let pushed = self.augment(s, t, limit - flow, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    fn augment(&mut self, u: usize, t: usize, f: u32, level: &[usize], it: &mut [usize]) -> u32 {
        if u == t {
            return f;
        }
        while it[u] < self.head[u].len() {
            let e = self.head[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let d = self.augment(v, t, f.min(self.cap[e]), level, it);
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0
    }
}

fn min_degree(g: &UndirectedGraph) -> usize {
    (0..g.num_nodes()).map(|v| g.degree(v)).min().unwrap_or(0)
}

fn guard(g: &UndirectedGraph, limit: usize) -> Result<()> {
    if g.num_nodes() > limit {
        return Err(AnalysisError::TooLarge {
            nodes: g.num_nodes(),
            limit,
        });
    }
    Ok(())
}

/// Number of edge-disjoint paths between `s` and `t`.
pub fn local_edge_connectivity(g: &UndirectedGraph, s: usize, t: usize) -> usize {
    let mut net = Network::new(g.num_nodes());
    for (u, v) in g.edges() {
        net.arc(u, v, 1);
        net.arc(v, u, 1);
    }
    net.max_flow(s, t, u32::MAX) as usize
}

/// Number of internally vertex-disjoint paths between non-adjacent `s` and `t`.
pub fn local_node_connectivity(g: &UndirectedGraph, s: usize, t: usize) -> usize {
    let n = g.num_nodes();
    let big = n as u32 + 1;
    let mut net = Network::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        net.arc(2 * v, 2 * v + 1, c);
    }
    for (u, v) in g.edges() {
        net.arc(2 * u + 1, 2 * v, big);
        net.arc(2 * v + 1, 2 * u, big);
    }
    net.max_flow(2 * s + 1, 2 * t, u32::MAX) as usize
}

/// Minimum number of edges whose removal disconnects the graph; 0 for
/// fewer than two nodes or a disconnected graph.
pub fn edge_connectivity(g: &UndirectedGraph, node_limit: usize) -> Result<usize> {
    guard(g, node_limit)?;
    let n = g.num_nodes();
    if n < 2 {
        return Ok(0);
    }
    let mut best = min_degree(g);
    for v in 1..n {
        if best == 0 {
            break;
        }
        let mut net = Network::new(n);
        for (a, b) in g.edges() {
            net.arc(a, b, 1);
            net.arc(b, a, 1);
        }
        best = best.min(net.max_flow(0, v, best as u32) as usize);
    }
    Ok(best)
}

/// Minimum number of nodes whose removal disconnects the graph (n − 1 for a
/// complete graph); 0 for fewer than two nodes or a disconnected graph.
pub fn node_connectivity(g: &UndirectedGraph, node_limit: usize) -> Result<usize> {
    guard(g, node_limit)?;
    let n = g.num_nodes();
    if n < 2 {
        return Ok(0);
    }
    if !g.is_connected() {
        return Ok(0);
    }
    if g.num_edges() == n * (n - 1) / 2 {
        return Ok(n - 1);
    }
    // Esfahanian-Hakimi: some minimum separator avoids v or separates two of its neighbours
    let v = (0..n).min_by_key(|&u| (g.degree(u), u)).unwrap();
    let mut best = g.degree(v);
    for w in 0..n {
        if w != v && !g.has_edge(v, w) {
            best = best.min(local_node_connectivity(g, v, w));
        }
    }
    let nb = g.neighbors(v);
    for (i, &x) in nb.iter().enumerate() {
        for &y in &nb[i + 1..] {
            if !g.has_edge(x, y) {
                best = best.min(local_node_connectivity(g, x, y));
            }
        }
    }
    Ok(best)
}
