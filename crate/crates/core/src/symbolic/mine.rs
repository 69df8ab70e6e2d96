//! Exhaustive closed-path rule mining over the train split.
//!
//! For every start entity X the miner walks all relation sequences of length
//! up to `max_body_len` (each step forwards or backwards) and records the set
//! of distinct end entities Y. A pattern's coverage is the number of distinct
//! (X, Y) pairs it reaches; its correct count is how many of those pairs are
//! train facts of the target. Counts are integers, so parallel reduction is
//! order independent.

use super::rule::{filter_degenerate, HornRule, Step, Verdict};
use super::{Result, SymbolicError};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Split};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    pub max_body_len: usize,
    /// Rules predicting fewer distinct pairs are dropped.
    pub min_coverage: u64,
    /// Rules with fewer correct predictions are dropped.
    pub min_correct: u64,
    pub max_rules_per_target: Option<usize>,
    pub parallel: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            max_body_len: 3,
            min_coverage: 1,
            min_correct: 1,
            max_rules_per_target: None,
            parallel: true,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.max_body_len) {
            return Err(SymbolicError::Config(format!(
                "max body length must be between 1 and 3, got {}",
                self.max_body_len
            )));
        }
        Ok(())
    }
}

/// The rules learned for one head relation, in theory order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTheory {
    pub target: RelationId,
    pub rules: Vec<HornRule>,
}

impl RuleTheory {
    pub fn new(target: RelationId, mut rules: Vec<HornRule>) -> Self {
        rules.sort_by(HornRule::theory_order);
        Self { target, rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Distinct relations across all rule bodies.
    pub fn body_relations(&self) -> BTreeSet<RelationId> {
        self.rules
            .iter()
            .flat_map(HornRule::body_relations)
            .collect()
    }
}

#[derive(Debug, Default, Clone)]
struct PatternStats {
    total: u64,
    correct: HashMap<RelationId, u64>,
}

type Stats = HashMap<Vec<Step>, PatternStats>;

fn merge(mut a: Stats, b: Stats) -> Stats {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, v) in b {
        let e = a.entry(k).or_default();
        e.total += v.total;
        for (r, c) in v.correct {
            *e.correct.entry(r).or_insert(0) += c;
        }
    }
    a
}

struct Adjacency {
    /// Per entity: sorted (step, neighbour) pairs covering both directions.
    out: Vec<Vec<(Step, EntityId)>>,
}

impl Adjacency {
    fn new(kg: &KnowledgeGraph) -> Self {
        let mut out = vec![Vec::new(); kg.num_entities()];
        for t in kg.triples(Split::Train) {
            out[t.head.index()].push((
                Step {
                    relation: t.relation,
                    inverted: false,
                },
                t.tail,
            ));
            out[t.tail.index()].push((
                Step {
                    relation: t.relation,
                    inverted: true,
                },
                t.head,
            ));
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        Self { out }
    }
}

fn stats_from(
    adj: &Adjacency,
    x: EntityId,
    max_len: usize,
    targets: &BTreeSet<RelationId>,
    into: &mut Stats,
) {
    // relations that hold as train facts target(x, y), keyed by y
    let mut facts: HashMap<EntityId, Vec<RelationId>> = HashMap::new();
    for &(step, y) in &adj.out[x.index()] {
        if !step.inverted && targets.contains(&step.relation) {
            facts.entry(y).or_default().push(step.relation);
        }
    }
    let mut level: HashMap<Vec<Step>, Vec<EntityId>> = HashMap::new();
    for &(step, y) in &adj.out[x.index()] {
        level.entry(vec![step]).or_default().push(y);
    }
    for depth in 1..=max_len {
        for (pattern, ends) in level.iter_mut() {
            ends.sort_unstable();
            ends.dedup();
            let s = into.entry(pattern.clone()).or_default();
            s.total += ends.len() as u64;
            for y in ends.iter() {
                if let Some(rs) = facts.get(y) {
                    for &r in rs {
                        *s.correct.entry(r).or_insert(0) += 1;
                    }
                }
            }
        }
        if depth == max_len {
            break;
        }
        let mut next: HashMap<Vec<Step>, Vec<EntityId>> = HashMap::new();
        for (pattern, ends) in &level {
            for &z in ends {
                for &(step, y) in &adj.out[z.index()] {
                    let mut p = Vec::with_capacity(pattern.len() + 1);
                    p.extend_from_slice(pattern);
                    p.push(step);
                    next.entry(p).or_default().push(y);
                }
            }
        }
        level = next;
    }
}

/// Mines one theory per target relation in a single pass over the train split.
pub fn mine_theories(
    kg: &KnowledgeGraph,
    targets: &[RelationId],
    cfg: &MiningConfig,
) -> Result<Vec<RuleTheory>> {
    cfg.validate()?;
    for &t in targets {
        if t.index() >= kg.num_relations() {
            return Err(SymbolicError::UnknownRelation(t.to_string()));
        }
    }
    let target_set: BTreeSet<RelationId> = targets.iter().copied().collect();
    let adj = Adjacency::new(kg);
    let starts: Vec<EntityId> = (0..kg.num_entities() as u32)
        .map(EntityId)
        .filter(|e| !adj.out[e.index()].is_empty())
        .collect();
    let stats = if cfg.parallel {
        starts
            .par_chunks(64)
            .map(|chunk| {
                let mut s = Stats::new();
                for &x in chunk {
                    stats_from(&adj, x, cfg.max_body_len, &target_set, &mut s);
                }
                s
            })
            .reduce(Stats::new, merge)
    } else {
        let mut s = Stats::new();
        for &x in &starts {
            stats_from(&adj, x, cfg.max_body_len, &target_set, &mut s);
        }
        s
    };

    let theories = targets
        .iter()
        .map(|&target| {
            let trivial = [Step {
                relation: target,
                inverted: false,
            }];
            let mut rules: Vec<HornRule> = stats
                .iter()
                .filter(|(p, _)| p.as_slice() != trivial)
                .filter_map(|(p, s)| {
                    let correct = s.correct.get(&target).copied().unwrap_or(0);
                    (correct >= cfg.min_correct.max(1) && s.total >= cfg.min_coverage)
                        .then(|| HornRule::chain(target, p, correct, s.total))
                })
                .filter(|r| filter_degenerate(r) == Verdict::Keep)
                .collect();
            rules.sort_by(HornRule::theory_order);
            if let Some(cap) = cfg.max_rules_per_target {
                rules.truncate(cap);
            }
            RuleTheory { target, rules }
        })
        .collect();
    Ok(theories)
}

pub fn mine_rules(
    kg: &KnowledgeGraph,
    target: RelationId,
    cfg: &MiningConfig,
) -> Result<RuleTheory> {
    Ok(mine_theories(kg, &[target], cfg)?.remove(0))
}
