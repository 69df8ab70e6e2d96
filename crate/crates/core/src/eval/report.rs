use super::{rank_counts_from_scores, CorruptionSet, EvalError, RankMode, Result, Scorer, Side};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Split};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Restricts candidates per (relation, side). The truth is never removed.
pub type TypeFilter = Arc<dyn Fn(RelationId, Side, EntityId) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct EvalConfig {
    pub rank_mode: RankMode,
    pub hits: Vec<usize>,
    pub per_query: bool,
    pub parallel: bool,
    pub type_filter: Option<TypeFilter>,
    /// Recorded in the report metadata only.
    pub seed: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rank_mode: RankMode::Expected,
            hits: vec![1, 3, 10],
            per_query: false,
            parallel: false,
            type_filter: None,
            seed: None,
        }
    }
}

impl std::fmt::Debug for EvalConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalConfig")
            .field("rank_mode", &self.rank_mode)
            .field("hits", &self.hits)
            .field("per_query", &self.per_query)
            .field("parallel", &self.parallel)
            .field("type_filter", &self.type_filter.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRank {
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub side: Side,
    pub candidates: usize,
    pub optimistic: f64,
    pub expected: f64,
    pub pessimistic: f64,
}

impl QueryRank {
    pub fn rank(&self, mode: RankMode) -> f64 {
        match mode {
            RankMode::Optimistic => self.optimistic,
            RankMode::Expected => self.expected,
            RankMode::Pessimistic => self.pessimistic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub queries: usize,
    pub hits: BTreeMap<usize, f64>,
    pub mrr: f64,
    pub mean_rank: f64,
}

impl Aggregates {
    fn from_ranks(ranks: &[f64], ks: &[usize]) -> Self {
        let n = ranks.len().max(1) as f64;
        Self {
            queries: ranks.len(),
            hits: ks
                .iter()
                .map(|&k| {
                    (
                        k,
                        ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / n,
                    )
                })
                .collect(),
            mrr: ranks.iter().map(|r| 1.0 / r).sum::<f64>() / n,
            mean_rank: ranks.iter().sum::<f64>() / n,
        }
    }

    pub fn hits_at(&self, k: usize) -> Option<f64> {
        self.hits.get(&k).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub scorer: String,
    pub split: Split,
    pub rank_mode: RankMode,
    pub seed: Option<u64>,
    /// Number of entities, i.e. the unfiltered candidate-set size.
    pub candidate_set_size: usize,
    pub mean_filtered_candidates: f64,
    pub overall: Aggregates,
    pub per_relation: BTreeMap<String, Aggregates>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_query: Vec<QueryRank>,
}

/// Ranks every triple of `split` on both sides against its filtered
/// corruption set.
pub fn evaluate<S: Scorer + ?Sized>(
    scorer: &S,
    kg: &KnowledgeGraph,
    split: Split,
    cfg: &EvalConfig,
) -> Result<RankResult> {
    let triples = kg.triples(split);
    if triples.is_empty() {
        return Err(EvalError::EmptySplit(split.to_string()));
    }
    let queries: Vec<(usize, Side)> = (0..triples.len())
        .flat_map(|i| [(i, Side::Head), (i, Side::Tail)])
        .collect();
    let n = kg.num_entities();
    let rank_one = |&(i, side): &(usize, Side)| -> Result<(QueryRank, RelationId)> {
        let q = triples[i];
        let set = match &cfg.type_filter {
            Some(f) => CorruptionSet::filtered_with(kg, q, side, |e| f(q.relation, side, e)),
            None => CorruptionSet::filtered(kg, q, side),
        };
        let scores = scorer.score_side(q, side, n);
        let counts = rank_counts_from_scores(&set, &scores)?;
        Ok((
            QueryRank {
                head: kg.entity_label(q.head).to_owned(),
                relation: kg.relation_label(q.relation).to_owned(),
                tail: kg.entity_label(q.tail).to_owned(),
                side,
                candidates: set.candidates.len(),
                optimistic: counts.optimistic(),
                expected: counts.expected(),
                pessimistic: counts.pessimistic(),
            },
            q.relation,
        ))
    };
    let ranked: Vec<(QueryRank, RelationId)> = if cfg.parallel {
        queries.par_iter().map(rank_one).collect::<Result<_>>()?
    } else {
        queries.iter().map(rank_one).collect::<Result<_>>()?
    };

    let mode = cfg.rank_mode;
    let ranks: Vec<f64> = ranked.iter().map(|(q, _)| q.rank(mode)).collect();
    let mut by_rel: BTreeMap<RelationId, Vec<f64>> = BTreeMap::new();
    for ((q, r), &rank) in ranked.iter().zip(&ranks) {
        debug_assert!(q.optimistic <= q.expected && q.expected <= q.pessimistic);
        by_rel.entry(*r).or_default().push(rank);
    }
    let mean_filtered_candidates =
        ranked.iter().map(|(q, _)| q.candidates as f64).sum::<f64>() / ranked.len() as f64;
    Ok(RankResult {
        scorer: scorer.id(),
        split,
        rank_mode: mode,
        seed: cfg.seed,
        candidate_set_size: n,
        mean_filtered_candidates,
        overall: Aggregates::from_ranks(&ranks, &cfg.hits),
        per_relation: by_rel
            .into_iter()
            .map(|(r, rs)| {
                (
                    kg.relation_label(r).to_owned(),
                    Aggregates::from_ranks(&rs, &cfg.hits),
                )
            })
            .collect(),
        per_query: if cfg.per_query {
            ranked.into_iter().map(|(q, _)| q).collect()
        } else {
            Vec::new()
        },
    })
}
