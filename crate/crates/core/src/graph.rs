//! Simple undirected graphs over labelled nodes.

use std::collections::{BTreeMap, VecDeque};

/// Simple undirected graph. Nodes carry a `u32` label (usually an entity
/// id); internally they are addressed by dense local indices `0..n`.
/// Adjacency lists are sorted and never contain self-loops or duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    labels: Vec<u32>,
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl UndirectedGraph {
    /// Builds a graph over `nodes` (labels, duplicates ignored) and `edges`
    /// between labels. Edges naming unknown labels add those nodes.
    /// Parallel edges collapse and self-loops are dropped.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        let mut local: BTreeMap<u32, usize> = BTreeMap::new();
        let edges: Vec<(u32, u32)> = edges.into_iter().collect();
        for n in nodes {
            local.entry(n).or_insert(0);
        }
        for &(a, b) in &edges {
            local.entry(a).or_insert(0);
            local.entry(b).or_insert(0);
        }
        let labels: Vec<u32> = local.keys().copied().collect();
        for (i, v) in local.values_mut().enumerate() {
            *v = i;
        }
        let mut adj = vec![Vec::new(); labels.len()];
        for (a, b) in edges {
            if a == b {
                continue;
            }
            let (i, j) = (local[&a], local[&b]);
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            count += list.len();
        }
        Self {
            labels,
            adj,
            edges: count / 2,
        }
    }

    /// Graph on local indices `0..n` with the given index edges.
    pub fn from_index_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges(
            0..n as u32,
            edges.into_iter().map(|(a, b)| (a as u32, b as u32)),
        )
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(low, high)` local indices.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Edges as label pairs `(low, high)`.
    pub fn label_edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .edges()
            .map(|(a, b)| {
                let (x, y) = (self.labels[a], self.labels[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Induced subgraph on the given local indices.
    pub fn induced(&self, nodes: &[usize]) -> UndirectedGraph {
        let mut keep = vec![false; self.num_nodes()];
        for &v in nodes {
            keep[v] = true;
        }
        let edges = nodes.iter().flat_map(|&a| {
            self.adj[a]
                .iter()
                .filter(|&&b| keep[b] && b > a)
                .map(move |&b| (self.labels[a], self.labels[b]))
                .collect::<Vec<_>>()
        });
        UndirectedGraph::from_edges(
            nodes.iter().map(|&v| self.labels[v]),
            edges.collect::<Vec<_>>(),
        )
    }

    /// Unweighted single-source distances; `usize::MAX` marks unreachable.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_nodes()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() <= 1 || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }
}

/// Splits `g` into connected components, ordered by smallest label.
pub fn connected_components(g: &UndirectedGraph) -> Vec<UndirectedGraph> {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(g.induced(&members));
    }
    out
}
