use super::{AnalysisError, Result};
use crate::graph::UndirectedGraph;

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// 2|E| / |V|; 0 for the empty graph.
pub fn average_degree(g: &UndirectedGraph) -> f64 {
    if g.num_nodes() == 0 {
        0.0
    } else {
        2.0 * g.num_edges() as f64 / g.num_nodes() as f64
    }
}

/// Per-node degrees as floats, in node order.
pub fn degrees(g: &UndirectedGraph) -> Vec<f64> {
    (0..g.num_nodes()).map(|v| g.degree(v) as f64).collect()
}

/// Mean neighbour degree of each node; `None` for isolated nodes.
pub fn neighbor_degrees(g: &UndirectedGraph) -> Vec<Option<f64>> {
    (0..g.num_nodes())
        .map(|v| {
            let nb = g.neighbors(v);
            (!nb.is_empty())
                .then(|| nb.iter().map(|&u| g.degree(u) as f64).sum::<f64>() / nb.len() as f64)
        })
        .collect()
}

/// Mean over non-isolated nodes of their mean neighbour degree.
pub fn avg_neighbor_degree(g: &UndirectedGraph) -> Option<f64> {
    let vals: Vec<f64> = neighbor_degrees(g).into_iter().flatten().collect();
    mean_std(&vals).map(|(m, _)| m)
}

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge. `None` when the degree variance is zero.
pub fn degree_assortativity(g: &UndirectedGraph) -> Option<f64> {
    if g.num_edges() == 0 {
        return None;
    }
    let pairs: Vec<(f64, f64)> = g
        .edges()
        .flat_map(|(u, v)| {
            let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
            [(du, dv), (dv, du)]
        })
        .collect();
    let m = pairs.len() as f64;
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let (mut cov, mut var) = (0.0, 0.0);
    for &(x, y) in &pairs {
        cov += (x - mean) * (y - mean);
        var += (x - mean) * (x - mean);
    }
    if var == 0.0 {
        None
    } else {
        Some(cov / var)
    }
}

/// Local clustering coefficient; 0 for degree below 2.
pub fn local_clustering(g: &UndirectedGraph, v: usize) -> f64 {
    let nb = g.neighbors(v);
    let d = nb.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.has_edge(a, b) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

/// Mean local clustering over all nodes.
pub fn clustering(g: &UndirectedGraph) -> f64 {
    if g.num_nodes() == 0 {
        return 0.0;
    }
    (0..g.num_nodes())
        .map(|v| local_clustering(g, v))
        .sum::<f64>()
        / g.num_nodes() as f64
}

/// Mean of deg(v) / (n − 1); `None` for fewer than two nodes.
pub fn degree_centrality(g: &UndirectedGraph) -> Option<f64> {
    let n = g.num_nodes();
    (n >= 2).then(|| (0..n).map(|v| g.degree(v) as f64).sum::<f64>() / ((n - 1) as f64 * n as f64))
}

fn require_connected(g: &UndirectedGraph) -> Result<()> {
    if g.num_nodes() == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(AnalysisError::Disconnected);
    }
    Ok(())
}

/// Mean of (n − 1) / Σ distances over the nodes of a connected graph;
/// `None` for a single node.
pub fn closeness_centrality(g: &UndirectedGraph) -> Result<Option<f64>> {
    require_connected(g)?;
    let n = g.num_nodes();
    if n < 2 {
        return Ok(None);
    }
    let total: f64 = (0..n)
        .map(|v| {
            let sum: usize = g.bfs_distances(v).iter().sum();
            (n - 1) as f64 / sum as f64
        })
        .sum();
    Ok(Some(total / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub mean_eccentricity: f64,
    pub radius: usize,
    pub diameter: usize,
}

pub fn eccentricities(g: &UndirectedGraph) -> Result<Vec<usize>> {
    require_connected(g)?;
    Ok((0..g.num_nodes())
        .map(|v| g.bfs_distances(v).into_iter().max().unwrap_or(0))
        .collect())
}

pub fn eccentricity_radius_diameter(g: &UndirectedGraph) -> Result<Distances> {
    let ecc = eccentricities(g)?;
    Ok(Distances {
        mean_eccentricity: ecc.iter().sum::<usize>() as f64 / ecc.len() as f64,
        radius: *ecc.iter().min().unwrap(),
        diameter: *ecc.iter().max().unwrap(),
    })
}
