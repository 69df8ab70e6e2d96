//! Relational classification: labels and folds, kNN, nested
//! cross-validation and accuracy differences between paradigms.

mod cv;
mod knn;
mod labels;
mod spaces;

pub use cv::{
    accuracy_difference, nested_cv, AccuracyDifference, CandidateSpace, CvConfig, CvResult,
    FoldResult,
};
pub use knn::{knn_classify, nearest, Weighting, K_GRID};
pub use labels::{
    assert_label_free, labels_from_relation, majority_class, read_folds, read_labels,
    stratified_folds, write_labels, LabeledEntities,
};
pub use spaces::{
    CheckpointStore, EmbeddingCandidate, EmbeddingSpace, FeatureSpace, KnnCandidate, RuleCandidate,
    RuleSpace, LABEL_RELATION,
};

use crate::embed::{EmbedError, ModelKind};
use crate::symbolic::SymbolicError;
use thiserror::Error;

pub const DEFAULT_OUTER_FOLDS: usize = 5;
pub const DEFAULT_INNER_FOLDS: usize = 3;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Labels(String),
    #[error("label triple present in the training view: {0}")]
    LabelLeak(String),
    #[error("fold structures differ: {0}")]
    FoldMismatch(String),
    #[error("missing checkpoint for {} dim={dim} epoch={epoch}", kind.as_str())]
    MissingCheckpoint {
        kind: ModelKind,
        dim: usize,
        epoch: usize,
    },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ClassifyError> = std::result::Result<T, E>;
