//! Maximal clique enumeration by Bron–Kerbosch with pivoting.

use super::{AnalysisError, Result};
use crate::graph::UndirectedGraph;
use serde::Serialize;

pub const MAX_CLIQUE_COUNT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CliqueStats {
    pub max_size: usize,
    pub count: u64,
    /// Enumeration stopped at the count cap.
    pub truncated: bool,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

struct Search<'a> {
    g: &'a UndirectedGraph,
    stats: CliqueStats,
    cap: u64,
}

impl Search<'_> {
    fn expand(&mut self, depth: usize, mut p: Vec<usize>, mut x: Vec<usize>) {
        if self.stats.truncated {
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                self.stats.count += 1;
                self.stats.max_size = self.stats.max_size.max(depth);
                if self.stats.count >= self.cap {
                    self.stats.truncated = true;
                }
            }
            return;
        }
        let g = self.g;
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| (count_common(&p, g.neighbors(u)), std::cmp::Reverse(u)))
            .unwrap();
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|v| !g.has_edge(pivot, *v))
            .collect();
        for v in candidates {
            let nv = g.neighbors(v);
            self.expand(depth + 1, intersect(&p, nv), intersect(&x, nv));
            if self.stats.truncated {
                return;
            }
            let pos = p.binary_search(&v).unwrap();
            p.remove(pos);
            let pos = x.binary_search(&v).unwrap_err();
            x.insert(pos, v);
        }
    }
}

pub fn cliques(g: &UndirectedGraph, node_limit: usize) -> Result<CliqueStats> {
    cliques_capped(g, node_limit, MAX_CLIQUE_COUNT)
}

/// Largest clique size and number of maximal cliques. Isolated nodes are
/// maximal cliques of size 1.
pub fn cliques_capped(g: &UndirectedGraph, node_limit: usize, cap: u64) -> Result<CliqueStats> {
    if g.num_nodes() > node_limit {
        return Err(AnalysisError::TooLarge {
            nodes: g.num_nodes(),
            limit: node_limit,
        });
    }
    let mut s = Search {
        g,
        stats: CliqueStats {
            max_size: 0,
            count: 0,
            truncated: false,
        },
        cap,
    };
    if g.num_nodes() > 0 {
        s.expand(0, (0..g.num_nodes()).collect(), Vec::new());
    }
    Ok(s.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
        UndirectedGraph::from_index_edges(n, edges.iter().copied())
    }

    #[test]
    fn triangle_with_pendant() {
        let t = g(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let s = cliques(&t, 100).unwrap();
        assert_eq!((s.max_size, s.count), (3, 2));
    }

    #[test]
    fn edgeless() {
        let s = cliques(&g(5, &[]), 100).unwrap();
        assert_eq!((s.max_size, s.count), (1, 5));
    }

    #[test]
    fn cap_truncates() {
        let s = cliques_capped(&g(5, &[]), 100, 3).unwrap();
        assert!(s.truncated);
        assert_eq!(s.count, 3);
    }
}
