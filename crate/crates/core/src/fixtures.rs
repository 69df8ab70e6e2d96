//! Constructed datasets and published reference numbers used by tests,
//! examples and `kgbench report --fixture`.

use crate::classify::{CvResult, LabeledEntities};
use crate::embed::Matrix;
use crate::graph::UndirectedGraph;
use crate::kg::{EntityId, KnowledgeGraph, Split};
use crate::report::{ClassificationEntry, KbcEntry, Results};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeSet;

fn kbc(dataset: &str, method: &str, hits: [f64; 3], decimals: usize) -> KbcEntry {
    KbcEntry {
        dataset: dataset.into(),
        method: method.into(),
        hits: [1, 3, 10].into_iter().zip(hits).collect(),
        mrr: None,
        decimals: Some(decimals),
        note: Some("as published".into()),
    }
}

/// Published hits@{1,3,10} on FB15-237 and WN18-RR, in publication order.
/// R-GCN has no WN18-RR entry.
pub fn kbc_reference_results() -> Vec<KbcEntry> {
    vec![
        kbc("FB15-237", "TILDE", [0.12, 0.27, 0.28], 2),
        kbc("WN18-RR", "TILDE", [0.16, 0.16, 0.16], 2),
        kbc("FB15-237", "ConvE", [0.327, 0.356, 0.501], 3),
        kbc("WN18-RR", "ConvE", [0.40, 0.44, 0.52], 2),
        kbc("FB15-237", "Complex", [0.158, 0.275, 0.428], 3),
        kbc("WN18-RR", "Complex", [0.41, 0.46, 0.51], 2),
        kbc("FB15-237", "DistMult", [0.155, 0.263, 0.419], 3),
        kbc("WN18-RR", "DistMult", [0.39, 0.44, 0.49], 2),
        kbc("FB15-237", "R-GCN", [0.153, 0.258, 0.417], 3),
    ]
}

/// Hepatitis decision-tree accuracies as five folds averaging .90
/// (distributional) and .81 (symbolic).
pub fn hepatitis_decision_tree() -> (CvResult, CvResult) {
    (
        CvResult::from_accuracies(&[0.92, 0.88, 0.90, 0.91, 0.89]),
        CvResult::from_accuracies(&[0.80, 0.83, 0.81, 0.79, 0.82]),
    )
}

pub fn reference_results() -> Results {
    let (dist, symb) = hepatitis_decision_tree();
    let diff = crate::classify::accuracy_difference(&dist, &symb).expect("fixture folds match");
    Results {
        kbc: kbc_reference_results(),
        classification: vec![ClassificationEntry {
            dataset: "Hepatitis".into(),
            classifier: "decision-tree".into(),
            embedding: "distmult".into(),
            acc_diff: diff.mean,
            per_fold: diff.per_fold,
        }],
        ..Results::default()
    }
}

pub const EQUIVALENCE_GROUPS: usize = 10;
pub const EQUIVALENCE_GROUP_SIZE: usize = 10;

/// Two relations with identical extensions. Each of 10 groups joins 10
/// sources to 10 targets with `r1` (1,000 triples over 200 entities) and
/// mirrors every pair in `r2`. Pairs with `(i + j) % 5 == 0` are held out:
/// their `r1` triple goes to valid and their `r2` triple to test. All other
/// triples of both relations are in train.
pub fn equivalence_kg() -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::new();
    for g in 0..EQUIVALENCE_GROUPS {
        for i in 0..EQUIVALENCE_GROUP_SIZE {
            for j in 0..EQUIVALENCE_GROUP_SIZE {
                let (s, t) = (format!("s{g}_{i}"), format!("t{g}_{j}"));
                let held_out = (i + j) % 5 == 0;
                let (r1_split, r2_split) = if held_out {
                    (Split::Valid, Split::Test)
                } else {
                    (Split::Train, Split::Train)
                };
                kg.add_labeled(&s, "r1", &t, r1_split)
                    .expect("fresh triple");
                kg.add_labeled(&s, "r2", &t, r2_split)
                    .expect("fresh triple");
            }
        }
    }
    kg
}

/// 14 entities in a `link` path (13 edges) plus 87 attribute triples with
/// distinct values; the informed graph keeps 13 of 100 edges.
pub fn attribute_fixture() -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::new();
    for i in 0..13 {
        kg.add_labeled(
            &format!("e{i}"),
            "link",
            &format!("e{}", i + 1),
            Split::Train,
        )
        .unwrap();
    }
    for k in 0..87 {
        kg.add_labeled(
            &format!("e{}", k % 14),
            &format!("attr{}", k % 3),
            &format!("value{k}"),
            Split::Train,
        )
        .unwrap();
    }
    for a in 0..3 {
        let r = kg.relation(&format!("attr{a}")).unwrap();
        kg.set_attribute(r, true);
    }
    kg
}

/// Uniformly random distinct triples, split 80/10/10 in generation order.
pub fn random_kg(entities: usize, relations: usize, triples: usize, seed: u64) -> KnowledgeGraph {
    assert!(entities >= 2 && relations >= 1);
    assert!(
        triples <= entities * entities * relations,
        "more triples requested than exist"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kg = KnowledgeGraph::new();
    for e in 0..entities {
        kg.intern_entity(&format!("e{e}"));
    }
    for r in 0..relations {
        kg.intern_relation(&format!("r{r}"));
    }
    let mut seen = BTreeSet::new();
    while seen.len() < triples {
        let t = (
            rng.gen_range(0..entities),
            rng.gen_range(0..relations),
            rng.gen_range(0..entities),
        );
        if !seen.insert(t) {
            continue;
        }
        let k = seen.len() - 1;
        let split = match k * 10 / triples.max(1) {
            0..=7 => Split::Train,
            8 => Split::Valid,
            _ => Split::Test,
        };
        kg.add_labeled(
            &format!("e{}", t.0),
            &format!("r{}", t.1),
            &format!("e{}", t.2),
            split,
        )
        .expect("distinct triple");
    }
    kg
}

/// Random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, seed: u64) -> UndirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let (a, b) = (order[i].min(parent), order[i].max(parent));
        edges.insert((a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    UndirectedGraph::from_index_edges(n, edges)
}

/// Erdős–Rényi G(n, p), possibly disconnected.
pub fn random_graph(n: usize, p: f64, seed: u64) -> UndirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    UndirectedGraph::from_index_edges(n, edges)
}

/// `n` points per class drawn from unit-variance Gaussians whose means sit
/// `separation` apart along each axis in turn.
pub fn gaussian_blobs(
    n: usize,
    dim: usize,
    classes: usize,
    separation: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut points = Vec::with_capacity(n * classes);
    let mut labels = Vec::with_capacity(n * classes);
    for c in 0..classes {
        for _ in 0..n {
            let p: Vec<f64> = (0..dim)
                .map(|d| {
                    normal.sample(&mut rng)
                        + if d == c % dim {
                            separation * c as f64
                        } else {
                            0.0
                        }
                })
                .collect();
            points.push(p);
            labels.push(c as u32);
        }
    }
    (points, labels)
}

/// Gaussian features with labels drawn independently of them: a balanced
/// two-class problem that no classifier can beat chance on. Row `i` of the
/// matrix belongs to `EntityId(i)`.
pub fn permutation_null(n: usize, dim: usize, seed: u64) -> (Matrix, LabeledEntities) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let data: Vec<f64> = (0..n * dim).map(|_| normal.sample(&mut rng)).collect();
    let mut classes: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
    classes.shuffle(&mut rng);
    let labels = LabeledEntities::from_pairs(
        classes
            .into_iter()
            .enumerate()
            .map(|(i, c)| (EntityId(i as u32), c))
            .collect(),
        vec!["neg".into(), "pos".into()],
    );
    (Matrix::from_vec(n, dim, data), labels)
}
