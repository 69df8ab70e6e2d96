use super::{ClassifyError, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::str::FromStr;

pub const K_GRID: [usize; 7] = [3, 5, 7, 9, 11, 13, 15];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Uniform,
    Distance,
}

impl Weighting {
    pub const ALL: [Weighting; 2] = [Weighting::Uniform, Weighting::Distance];

    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::Distance => "distance",
        }
    }
}

impl FromStr for Weighting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "distance" => Ok(Weighting::Distance),
            other => Err(format!(
                "unknown weighting `{other}` (expected uniform or distance)"
            )),
        }
    }
}

#[derive(PartialEq)]
struct Neighbor {
    d2: f64,
    index: usize,
}

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` nearest training rows, nearest first; equal distances
/// prefer the lower training index.
pub fn nearest(train: &[Vec<f64>], query: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut heap: BinaryHeap<Neighbor> = BinaryHeap::with_capacity(k + 1);
    for (index, row) in train.iter().enumerate() {
        let n = Neighbor {
            d2: squared_distance(row, query),
            index,
        };
        if heap.len() < k {
            heap.push(n);
        } else if n < *heap.peek().unwrap() {
            heap.pop();
            heap.push(n);
        }
    }
    heap.into_sorted_vec()
        .into_iter()
        .map(|n| (n.index, n.d2))
        .collect()
}

/// Class with the largest vote; ties go to the smallest class id.
fn vote(neighbors: &[(usize, f64)], labels: &[u32], weighting: Weighting) -> u32 {
    let exact: Vec<&(usize, f64)> = neighbors.iter().filter(|(_, d2)| *d2 == 0.0).collect();
    let mut tally: Vec<(u32, f64)> = Vec::new();
    let mut add = |c: u32, w: f64| match tally.iter_mut().find(|(k, _)| *k == c) {
        Some(e) => e.1 += w,
        None => tally.push((c, w)),
    };
    match weighting {
        Weighting::Uniform => neighbors.iter().for_each(|&(i, _)| add(labels[i], 1.0)),
        Weighting::Distance if !exact.is_empty() => {
            exact.iter().for_each(|&&(i, _)| add(labels[i], 1.0))
        }
        Weighting::Distance => neighbors
            .iter()
            .for_each(|&(i, d2)| add(labels[i], 1.0 / d2.sqrt())),
    }
    tally
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c)
        .unwrap()
}

/// Euclidean k-nearest-neighbour classification. With distance weighting,
/// neighbours at distance 0 outvote all others.
pub fn knn_classify(
    train: &[Vec<f64>],
    labels: &[u32],
    test: &[Vec<f64>],
    k: usize,
    weighting: Weighting,
) -> Result<Vec<u32>> {
    if train.is_empty() {
        return Err(ClassifyError::EmptyTrainingSet);
    }
    if train.len() != labels.len() {
        return Err(ClassifyError::Config(format!(
            "{} training rows but {} labels",
            train.len(),
            labels.len()
        )));
    }
    if k == 0 || k > train.len() {
        return Err(ClassifyError::Config(format!(
            "k = {k} must be between 1 and the training size {}",
            train.len()
        )));
    }
    Ok(test
        .iter()
        .map(|q| vote(&nearest(train, q, k), labels, weighting))
        .collect())
}
