//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use kgbench::graph::UndirectedGraph;

pub fn adjacency(g: &UndirectedGraph) -> Vec<Vec<bool>> {
    let n = g.num_nodes();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn degree(a: &[Vec<bool>], v: usize) -> usize {
    a[v].iter().filter(|&&x| x).count()
}

/// All-pairs shortest path lengths; `None` when unreachable.
pub fn floyd_warshall(a: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = a.len();
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Some(0)
                    } else if a[i][j] {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn avg_neighbor_degree(a: &[Vec<bool>]) -> Option<f64> {
    let vals: Vec<f64> = (0..a.len())
        .filter(|&v| degree(a, v) > 0)
        .map(|v| {
            let nb: Vec<usize> = (0..a.len()).filter(|&u| a[v][u]).collect();
            nb.iter().map(|&u| degree(a, u) as f64).sum::<f64>() / nb.len() as f64
        })
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Newman's edge-sum form evaluated in exact integer arithmetic.
pub fn assortativity(a: &[Vec<bool>]) -> Option<f64> {
    let n = a.len();
    let (mut m, mut s_jk, mut s_sum, mut s_sq) = (0i128, 0i128, 0i128, 0i128);
    for u in 0..n {
        for v in u + 1..n {
            if a[u][v] {
                let (j, k) = (degree(a, u) as i128, degree(a, v) as i128);
                m += 1;
                s_jk += j * k;
                s_sum += j + k;
                s_sq += j * j + k * k;
            }
        }
    }
    if m == 0 {
        return None;
    }
    let num = 4 * m * s_jk - s_sum * s_sum;
    let den = 2 * m * s_sq - s_sum * s_sum;
    (den != 0).then(|| num as f64 / den as f64)
}

pub fn clustering(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for v in 0..n {
        let d = degree(a, v);
        if d < 2 {
            continue;
        }
        let mut tri = 0;
        for x in 0..n {
            for y in 0..n {
                if x != y && a[v][x] && a[v][y] && a[x][y] {
                    tri += 1;
                }
            }
        }
        total += tri as f64 / (d * (d - 1)) as f64;
    }
    total / n as f64
}

pub fn degree_centrality(a: &[Vec<bool>]) -> Option<f64> {
    let n = a.len();
    (n >= 2).then(|| {
        (0..n)
            .map(|v| degree(a, v) as f64 / (n - 1) as f64)
            .sum::<f64>()
            / n as f64
    })
}

pub fn closeness(a: &[Vec<bool>]) -> Option<f64> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    let d = floyd_warshall(a);
    let per: Vec<f64> = (0..n)
        .map(|v| (n - 1) as f64 / d[v].iter().map(|x| x.expect("connected")).sum::<usize>() as f64)
        .collect();
    Some(per.iter().sum::<f64>() / n as f64)
}

/// (mean eccentricity, radius, diameter) of a connected graph.
pub fn distances(a: &[Vec<bool>]) -> (f64, usize, usize) {
    let d = floyd_warshall(a);
    let ecc: Vec<usize> = d
        .iter()
        .map(|row| row.iter().map(|x| x.expect("connected")).max().unwrap())
        .collect();
    (
        ecc.iter().sum::<usize>() as f64 / ecc.len() as f64,
        *ecc.iter().min().unwrap(),
        *ecc.iter().max().unwrap(),
    )
}

fn connected_without(a: &[Vec<bool>], removed: u32) -> bool {
    let n = a.len();
    let alive: Vec<usize> = (0..n).filter(|&v| removed >> v & 1 == 0).collect();
    if alive.len() <= 1 {
        return true;
    }
    let mut seen = 1u32 << alive[0];
    let mut stack = vec![alive[0]];
    while let Some(v) = stack.pop() {
        for u in 0..n {
            if a[v][u] && removed >> u & 1 == 0 && seen >> u & 1 == 0 {
                seen |= 1 << u;
                stack.push(u);
            }
        }
    }
    alive.iter().all(|&v| seen >> v & 1 == 1)
}

/// Minimum cut over every vertex bipartition.
pub fn edge_connectivity(a: &[Vec<bool>]) -> usize {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mut best = usize::MAX;
    // node 0 always on the left side; the right side must be non-empty
    for mask in 0..(1u32 << (n - 1)) - 1 {
        let left = (mask << 1) | 1;
        let mut cut = 0;
        for u in 0..n {
            for v in 0..n {
                if a[u][v] && left >> u & 1 == 1 && left >> v & 1 == 0 {
                    cut += 1;
                }
            }
        }
        best = best.min(cut);
    }
    best
}

/// Smallest vertex set whose removal disconnects the rest; n − 1 for
/// complete graphs.
pub fn node_connectivity(a: &[Vec<bool>]) -> usize {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let complete = (0..n).all(|u| (0..n).all(|v| u == v || a[u][v]));
    if complete {
        return n - 1;
    }
    (0..1u32 << n)
        .filter(|&s| (s.count_ones() as usize) <= n - 2 && !connected_without(a, s))
        .map(|s| s.count_ones() as usize)
        .min()
        .expect("a non-complete graph has a separator")
}

/// (maximum clique size, number of maximal cliques) by subset enumeration.
pub fn cliques(a: &[Vec<bool>]) -> (usize, u64) {
    let n = a.len();
    let is_clique = |s: u32| {
        (0..n).all(|u| (0..n).all(|v| u == v || s >> u & 1 == 0 || s >> v & 1 == 0 || a[u][v]))
    };
    let (mut max, mut count) = (0, 0);
    for s in 1..(1u32 << n) {
        if !is_clique(s) {
            continue;
        }
        max = max.max(s.count_ones() as usize);
        let maximal = (0..n).all(|w| s >> w & 1 == 1 || !is_clique(s | 1 << w));
        if maximal {
            count += 1;
        }
    }
    (max, count)
}

/// Direct transcription of the expected-rank definition: one plus half the
/// strictly-better corrupted candidates plus half the at-least-as-good ones.
pub fn expected_rank(truth: f64, corrupted: &[f64]) -> f64 {
    let lt = corrupted.iter().filter(|&&c| truth < c).count() as f64;
    let le = corrupted.iter().filter(|&&c| truth <= c).count() as f64;
    1.0 + 0.5 * lt + 0.5 * le
}

/// kNN by sorting every training point by (distance, index).
pub fn knn(
    train: &[Vec<f64>],
    labels: &[u32],
    query: &[f64],
    k: usize,
    distance_weighted: bool,
) -> u32 {
    let mut all: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| {
            (
                row.iter()
                    .zip(query)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>(),
                i,
            )
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let top = &all[..k];
    let exact: Vec<&(f64, usize)> = top.iter().filter(|p| p.0 == 0.0).collect();
    let mut votes: std::collections::BTreeMap<u32, f64> = Default::default();
    if distance_weighted && !exact.is_empty() {
        for p in exact {
            *votes.entry(labels[p.1]).or_default() += 1.0;
        }
    } else {
        for p in top {
            let w = if distance_weighted {
                1.0 / p.0.sqrt()
            } else {
                1.0
            };
            *votes.entry(labels[p.1]).or_default() += w;
        }
    }
    let best = votes.values().copied().fold(f64::NEG_INFINITY, f64::max);
    *votes.iter().find(|(_, &v)| v == best).unwrap().0
}
