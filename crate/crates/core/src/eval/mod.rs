//! Filtered link-prediction evaluation with tie-aware ranks.
//!
//! For a test triple and a side (head or tail), the candidate set is every
//! entity placed on that side, minus candidates forming a known-true triple
//! other than the query itself. With `g` corrupted candidates scoring
//! strictly above the truth and `e` tying with it:
//!
//! | mode        | rank              |
//! |-------------|-------------------|
//! | optimistic  | `1 + g`           |
//! | pessimistic | `1 + g + e`       |
//! | expected    | `1 + g + e/2`     |
//!
//! The optimistic rank files the truth first among equals, which rewards
//! a constant scorer with a perfect hits@1; the expected rank is the
//! default.

mod report;

pub use report::{evaluate, Aggregates, EvalConfig, QueryRank, RankResult, TypeFilter};

use crate::kg::{EntityId, KnowledgeGraph, RelationId, Triple};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("non-finite score {score} for candidate {candidate} ({side} side of {query:?})")]
    NonFiniteScore {
        query: Triple,
        side: Side,
        candidate: EntityId,
        score: f64,
    },
    #[error("corruption set is empty")]
    EmptyCandidates,
    #[error("split `{0}` has no triples")]
    EmptySplit(String),
    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// Plausibility function ψ(head, relation, tail); higher is more plausible.
pub trait Scorer: Sync {
    fn score(&self, head: EntityId, relation: RelationId, tail: EntityId) -> f64;

    /// Scores of `query` with every entity `0..num_entities` substituted on
    /// `side`. Implementations may override this with a batched path.
    fn score_side(&self, query: Triple, side: Side, num_entities: usize) -> Vec<f64> {
        (0..num_entities as u32)
            .map(|e| {
                let c = query.with_side(side, EntityId(e));
                self.score(c.head, c.relation, c.tail)
            })
            .collect()
    }

    fn id(&self) -> String {
        "scorer".to_owned()
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn score(&self, head: EntityId, relation: RelationId, tail: EntityId) -> f64 {
        (**self).score(head, relation, tail)
    }

    fn score_side(&self, query: Triple, side: Side, num_entities: usize) -> Vec<f64> {
        (**self).score_side(query, side, num_entities)
    }

    fn id(&self) -> String {
        (**self).id()
    }
}

impl Scorer for crate::embed::EmbeddingModel {
    fn score(&self, head: EntityId, relation: RelationId, tail: EntityId) -> f64 {
        self.score_unchecked(head, relation, tail)
    }

    fn id(&self) -> String {
        format!("{}-d{}-seed{}", self.kind, self.dim, self.seed)
    }
}

/// Scorer wrapping a closure.
pub struct FnScorer<F>(pub F);

impl<F: Fn(EntityId, RelationId, EntityId) -> f64 + Sync> Scorer for FnScorer<F> {
    fn score(&self, head: EntityId, relation: RelationId, tail: EntityId) -> f64 {
        (self.0)(head, relation, tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Head,
    Tail,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Head => "head",
            Side::Tail => "tail",
        })
    }
}

impl Triple {
    /// Copy with the entity on `side` replaced.
    pub fn with_side(self, side: Side, e: EntityId) -> Triple {
        match side {
            Side::Head => Triple::new(e, self.relation, self.tail),
            Side::Tail => Triple::new(self.head, self.relation, e),
        }
    }

    pub fn side(self, side: Side) -> EntityId {
        match side {
            Side::Head => self.head,
            Side::Tail => self.tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Optimistic,
    #[default]
    Expected,
    Pessimistic,
}

impl RankMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RankMode::Optimistic => "optimistic",
            RankMode::Expected => "expected",
            RankMode::Pessimistic => "pessimistic",
        }
    }
}

impl FromStr for RankMode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimistic" => Ok(RankMode::Optimistic),
            "expected" => Ok(RankMode::Expected),
            "pessimistic" => Ok(RankMode::Pessimistic),
            o => Err(EvalError::Config(format!("unknown rank mode `{o}`"))),
        }
    }
}

/// A query with its filtered candidates. `candidates` includes the truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionSet {
    pub query: Triple,
    pub side: Side,
    pub candidates: Vec<EntityId>,
}

impl CorruptionSet {
    /// All entities on `side`, minus those forming known-true triples other
    /// than the query.
    pub fn filtered(kg: &KnowledgeGraph, query: Triple, side: Side) -> Self {
        Self::filtered_with(kg, query, side, |_| true)
    }

    /// As [`filtered`](Self::filtered), additionally keeping only candidates
    /// accepted by `keep` (the truth is always kept).
    pub fn filtered_with(
        kg: &KnowledgeGraph,
        query: Triple,
        side: Side,
        keep: impl Fn(EntityId) -> bool,
    ) -> Self {
        let truth = query.side(side);
        let mut known = vec![false; kg.num_entities()];
        for split in crate::kg::Split::ALL {
            let idx = kg.index(split);
            let others = match side {
                Side::Head => idx.heads(query.relation, query.tail),
                Side::Tail => idx.tails(query.relation, query.head),
            };
            for e in others {
                known[e.index()] = true;
            }
        }
        let candidates = (0..kg.num_entities() as u32)
            .map(EntityId)
            .filter(|&e| e == truth || (!known[e.index()] && keep(e)))
            .collect();
        Self {
            query,
            side,
            candidates,
        }
    }

    pub fn truth(&self) -> EntityId {
        self.query.side(self.side)
    }

    /// Corrupted candidates, i.e. everything but the truth.
    pub fn num_corrupted(&self) -> usize {
        self.candidates
            .iter()
            .filter(|&&e| e != self.truth())
            .count()
    }
}

/// Strictly-greater and tied counts of the corrupted candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankCounts {
    pub greater: usize,
    pub ties: usize,
}

impl RankCounts {
    pub fn optimistic(self) -> f64 {
        1.0 + self.greater as f64
    }

    pub fn pessimistic(self) -> f64 {
        1.0 + (self.greater + self.ties) as f64
    }

    pub fn expected(self) -> f64 {
        1.0 + self.greater as f64 + self.ties as f64 / 2.0
    }

    pub fn rank(self, mode: RankMode) -> f64 {
        match mode {
            RankMode::Optimistic => self.optimistic(),
            RankMode::Expected => self.expected(),
            RankMode::Pessimistic => self.pessimistic(),
        }
    }
}

/// Counts from a full score vector indexed by entity id.
pub fn rank_counts_from_scores(set: &CorruptionSet, scores: &[f64]) -> Result<RankCounts> {
    if set.candidates.is_empty() {
        return Err(EvalError::EmptyCandidates);
    }
    let truth = set.truth();
    let err = |candidate: EntityId, score: f64| EvalError::NonFiniteScore {
        query: set.query,
        side: set.side,
        candidate,
        score,
    };
    let t = scores[truth.index()];
    if !t.is_finite() {
        return Err(err(truth, t));
    }
    let mut counts = RankCounts::default();
    for &e in &set.candidates {
        if e == truth {
            continue;
        }
        let s = scores[e.index()];
        if !s.is_finite() {
            return Err(err(e, s));
        }
        if s > t {
            counts.greater += 1;
        } else if s == t {
            counts.ties += 1;
        }
    }
    Ok(counts)
}

pub fn rank_counts<S: Scorer + ?Sized>(scorer: &S, set: &CorruptionSet) -> Result<RankCounts> {
    if set.candidates.is_empty() {
        return Err(EvalError::EmptyCandidates);
    }
    let n = set
        .candidates
        .iter()
        .map(|e| e.index() + 1)
        .max()
        .unwrap_or(0);
    let mut scores = vec![f64::NEG_INFINITY; n];
    for &e in &set.candidates {
        let c = set.query.with_side(set.side, e);
        scores[e.index()] = scorer.score(c.head, c.relation, c.tail);
    }
    rank_counts_from_scores(set, &scores)
}

/// `1 + #{corrupted scoring strictly above the truth}`
pub fn optimistic_rank<S: Scorer + ?Sized>(scorer: &S, set: &CorruptionSet) -> Result<f64> {
    Ok(rank_counts(scorer, set)?.optimistic())
}

/// `1 + #{corrupted scoring at least the truth}`
pub fn pessimistic_rank<S: Scorer + ?Sized>(scorer: &S, set: &CorruptionSet) -> Result<f64> {
    Ok(rank_counts(scorer, set)?.pessimistic())
}

/// Mean of the optimistic and pessimistic ranks.
pub fn expected_rank<S: Scorer + ?Sized>(scorer: &S, set: &CorruptionSet) -> Result<f64> {
    Ok(rank_counts(scorer, set)?.expected())
}
