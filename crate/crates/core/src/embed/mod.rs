//! TransE, DistMult and ComplEx embeddings: scoring, negative sampling,
//! SGD training, `KGE1` checkpoints and feature export.

mod checkpoint;
mod features;
pub mod loss;
mod model;
mod negatives;
mod train;

pub use checkpoint::{
    checkpoint_path, load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint,
    DirectorySink, CHECKPOINT_MAGIC,
};
pub use features::{export_features, feature_width, write_features_csv};
pub use loss::{Example, Gradient, LossConfig};
pub use model::{complex, distmult, transe, EmbeddingModel, Matrix, ModelKind, Table};
pub use negatives::{sample_negatives, SamplingStats, MAX_REJECTIONS};
pub use train::{
    train, CheckpointSink, MemorySink, NoCheckpoints, TrainConfig, TrainReport, DIM_GRID,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("train split is empty")]
    EmptyTrainSplit,
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },
    #[error("invalid checkpoint: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EmbedError> = std::result::Result<T, E>;
