//! Horn rules over the train split: mining, scoring, rule files and
//! theory statistics.

mod analytics;
mod format;
mod mine;
mod rule;
mod scorer;
mod solve;

pub use analytics::{
    connected_relations, histogram, theory_analytics, HistogramBin, RelationConnectivity,
    RulePoint, TheoryAnalytics, TheorySummary, COVERAGE_BIN_WIDTH, COVERAGE_CAP,
};
pub use format::{parse_rule_line, read_rules, rule_text, write_rules, INVERSE_PREFIX};
pub use mine::{mine_rules, mine_theories, MiningConfig, RuleTheory};
pub use rule::{filter_degenerate, Atom, DegenerateReason, HornRule, Step, Term, Verdict};
pub use scorer::{Aggregation, RuleScorer};
pub use solve::{CompiledRule, TrainView};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid rule: {0}")]
    Rule(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SymbolicError> = std::result::Result<T, E>;
