use super::mine::RuleTheory;
use super::rule::HornRule;
use super::solve::{CompiledRule, TrainView};
use super::Result;
use crate::eval::{Scorer, Side};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Split, Triple};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

/// How the confidences of several firing rules combine into one score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Max,
    NoisyOr,
}

impl FromStr for Aggregation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "max" => Ok(Aggregation::Max),
            "noisy-or" | "noisy_or" | "noisyor" => Ok(Aggregation::NoisyOr),
            other => Err(format!(
                "unknown aggregation `{other}` (expected max or noisy-or)"
            )),
        }
    }
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Max => "max",
            Aggregation::NoisyOr => "noisy-or",
        }
    }
}

/// Scores a triple by the confidences of the rules of its relation whose
/// bodies hold in the train split. No firing rule scores 0.
pub struct RuleScorer<'a> {
    view: TrainView<'a>,
    rules: BTreeMap<RelationId, Vec<(f64, CompiledRule)>>,
    aggregation: Aggregation,
    train_facts_score_one: bool,
}

impl<'a> RuleScorer<'a> {
    pub fn new(
        kg: &'a KnowledgeGraph,
        theories: &[RuleTheory],
        aggregation: Aggregation,
    ) -> Result<Self> {
        let mut rules: BTreeMap<RelationId, Vec<(f64, CompiledRule)>> = BTreeMap::new();
        for th in theories {
            let mut sorted: Vec<&HornRule> = th.rules.iter().collect();
            sorted.sort_by(|a, b| a.theory_order(b));
            let entry = rules.entry(th.target).or_default();
            for r in sorted {
                entry.push((r.confidence(), CompiledRule::new(r)?));
            }
        }
        Ok(Self {
            view: TrainView::new(kg),
            rules,
            aggregation,
            train_facts_score_one: false,
        })
    }

    /// Train facts score 1.0 regardless of the rules.
    pub fn with_train_facts_score_one(mut self, on: bool) -> Self {
        self.train_facts_score_one = on;
        self
    }

    fn combine(&self, acc: f64, conf: f64) -> f64 {
        match self.aggregation {
            Aggregation::Max => acc.max(conf),
            Aggregation::NoisyOr => 1.0 - (1.0 - acc) * (1.0 - conf),
        }
    }
}

impl Scorer for RuleScorer<'_> {
    fn score(&self, head: EntityId, relation: RelationId, tail: EntityId) -> f64 {
        if self.train_facts_score_one
            && self
                .view
                .kg()
                .contains(Split::Train, &Triple::new(head, relation, tail))
        {
            return 1.0;
        }
        let Some(rules) = self.rules.get(&relation) else {
            return 0.0;
        };
        let mut acc = 0.0;
        for (conf, rule) in rules {
            if self.aggregation == Aggregation::Max && *conf <= acc {
                break;
            }
            if self.view.fires(rule, head, tail) {
                acc = self.combine(acc, *conf);
            }
        }
        acc
    }

    fn score_side(&self, query: Triple, side: Side, num_entities: usize) -> Vec<f64> {
        let mut scores = vec![0.0; num_entities];
        if let Some(rules) = self.rules.get(&query.relation) {
            let fixed = match side {
                Side::Tail => (Some(query.head), None),
                Side::Head => (None, Some(query.tail)),
            };
            let mut mask = vec![false; num_entities];
            for (conf, rule) in rules {
                mask.iter_mut().for_each(|m| *m = false);
                self.view.predictions_for(rule, fixed, &mut mask);
                for (s, &m) in scores.iter_mut().zip(&mask) {
                    if m {
                        *s = self.combine(*s, *conf);
                    }
                }
            }
        }
        if self.train_facts_score_one {
            let kg = self.view.kg();
            for (e, s) in scores.iter_mut().enumerate() {
                if kg.contains(Split::Train, &query.with_side(side, EntityId(e as u32))) {
                    *s = 1.0;
                }
            }
        }
        scores
    }

    fn id(&self) -> String {
        format!("rules-{}", self.aggregation.as_str())
    }
}
