use super::format::rule_text;
use super::mine::RuleTheory;
use super::solve::{CompiledRule, TrainView};
use super::Result;
use crate::kg::{KnowledgeGraph, RelationId, Triple};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub label: String,
    pub lo: u64,
    /// `None` for the open-ended terminal bin.
    pub hi: Option<u64>,
    pub count: usize,
}

/// Fixed-width bins starting at `start`. Values above `cap` share one terminal
/// bin labelled `>cap`; without a cap the bins extend to the maximum value.
/// Values below `start` are ignored.
pub fn histogram(values: &[u64], start: u64, width: u64, cap: Option<u64>) -> Vec<HistogramBin> {
    assert!(width > 0, "bin width must be positive");
    let top = match cap {
        Some(c) => c,
        None => values.iter().copied().max().unwrap_or(start).max(start),
    };
    let mut bins = Vec::new();
    let mut lo = start;
    while lo <= top {
        let hi = (lo + width - 1).min(top.max(lo));
        let hi = if cap.is_none() { lo + width - 1 } else { hi };
        bins.push(HistogramBin {
            label: format!("{lo}-{hi}"),
            lo,
            hi: Some(hi),
            count: 0,
        });
        lo += width;
    }
    if let Some(c) = cap {
        bins.push(HistogramBin {
            label: format!(">{c}"),
            lo: c + 1,
            hi: None,
            count: 0,
        });
    }
    for &v in values {
        if v < start {
            continue;
        }
        if let Some(b) = bins
            .iter_mut()
            .find(|b| v >= b.lo && b.hi.is_none_or(|h| v <= h))
        {
            b.count += 1;
        }
    }
    bins
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationConnectivity {
    pub relation: String,
    /// Other relations sharing at least one entity with this one.
    pub connected: usize,
}

/// Per relation, how many other relations touch one of its entities, over
/// all splits. Ordered by relation id.
pub fn connected_relations(kg: &KnowledgeGraph) -> Vec<RelationConnectivity> {
    let mut touching: Vec<BTreeSet<RelationId>> = vec![BTreeSet::new(); kg.num_entities()];
    let mut entities: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); kg.num_relations()];
    for t in kg.all_triples() {
        for e in [t.head, t.tail] {
            touching[e.index()].insert(t.relation);
            entities[t.relation.index()].insert(e.index());
        }
    }
    (0..kg.num_relations())
        .map(|r| {
            let mut others: BTreeSet<RelationId> = BTreeSet::new();
            for &e in &entities[r] {
                others.extend(touching[e].iter().copied());
            }
            others.remove(&RelationId(r as u32));
            RelationConnectivity {
                relation: kg.relation_label(RelationId(r as u32)).to_owned(),
                connected: others.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheorySummary {
    pub target: String,
    pub rules: usize,
    /// Distinct relations used across the theory's rule bodies.
    pub body_relations: usize,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulePoint {
    pub target: String,
    pub rule: String,
    pub coverage: u64,
    /// Correct predictions over train predictions (the mined confidence).
    pub train_precision: f64,
    /// Share of predictions that are facts in any split.
    pub ground_truth_precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryAnalytics {
    pub theories: Vec<TheorySummary>,
    pub rules: Vec<RulePoint>,
    pub coverage_bins: Vec<HistogramBin>,
}

pub const COVERAGE_BIN_WIDTH: u64 = 50;
pub const COVERAGE_CAP: u64 = 400;

pub fn theory_analytics(kg: &KnowledgeGraph, theories: &[RuleTheory]) -> Result<TheoryAnalytics> {
    let view = TrainView::new(kg);
    let mut summaries = Vec::new();
    let mut points = Vec::new();
    for th in theories {
        summaries.push(TheorySummary {
            target: kg.relation_label(th.target).to_owned(),
            rules: th.rules.len(),
            body_relations: th.body_relations().len(),
            empty: th.is_empty(),
        });
        for r in &th.rules {
            let compiled = CompiledRule::new(r)?;
            let preds = view.all_predictions(&compiled);
            let hits = preds
                .iter()
                .filter(|&&(x, y)| kg.is_known(&Triple::new(x, th.target, y)))
                .count();
            points.push(RulePoint {
                target: kg.relation_label(th.target).to_owned(),
                rule: rule_text(kg, r),
                coverage: r.coverage(),
                train_precision: r.confidence(),
                ground_truth_precision: if preds.is_empty() {
                    0.0
                } else {
                    hits as f64 / preds.len() as f64
                },
            });
        }
    }
    let covs: Vec<u64> = points.iter().map(|p| p.coverage).collect();
    Ok(TheoryAnalytics {
        theories: summaries,
        rules: points,
        coverage_bins: histogram(&covs, 1, COVERAGE_BIN_WIDTH, Some(COVERAGE_CAP)),
    })
}
