use super::loss::{loss_and_gradient, loss_and_gradient_sharded, Example, LossConfig};
use super::model::{EmbeddingModel, ModelKind};
use super::negatives::{sample_negatives, SamplingStats};
use super::{EmbedError, Result};
use crate::kg::{KnowledgeGraph, Split};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Embedding dimensions searched by the classification track.
pub const DIM_GRID: [usize; 6] = [10, 20, 30, 50, 80, 100];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub dim: usize,
    pub epochs: usize,
    pub checkpoint_every: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub negatives_per_positive: usize,
    pub margin: f64,
    pub regularization: f64,
    pub seed: u64,
    /// Concurrent gradient shards per batch; 1 disables the thread pool.
    pub shards: usize,
}

impl TrainConfig {
    pub fn new(kind: ModelKind, dim: usize) -> Self {
        Self {
            kind,
            dim,
            epochs: 100,
            checkpoint_every: 20,
            batch_size: 512,
            learning_rate: 0.01,
            negatives_per_positive: 1,
            margin: 1.0,
            regularization: 1e-4,
            seed: 0,
            shards: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(EmbedError::Config(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if self.checkpoint_every == 0 || self.epochs % self.checkpoint_every != 0 {
            return bad("checkpoint_every must divide epochs");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.negatives_per_positive == 0 {
            return bad("negatives_per_positive must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.margin.is_finite()
            && self.regularization.is_finite()
            && self.regularization >= 0.0)
        {
            return bad("margin and regularization must be finite");
        }
        Ok(())
    }

    pub fn loss(&self) -> LossConfig {
        LossConfig {
            margin: self.margin,
            regularization: self.regularization,
        }
    }
}

/// Receives the model at every checkpoint epoch.
pub trait CheckpointSink {
    fn save(&mut self, epoch: usize, model: &EmbeddingModel) -> Result<()>;
}

/// Keeps checkpoints in memory.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub checkpoints: Vec<(usize, EmbeddingModel)>,
}

impl CheckpointSink for MemorySink {
    fn save(&mut self, epoch: usize, model: &EmbeddingModel) -> Result<()> {
        self.checkpoints.push((epoch, model.clone()));
        Ok(())
    }
}

/// Discards checkpoints.
pub struct NoCheckpoints;

impl CheckpointSink for NoCheckpoints {
    fn save(&mut self, _: usize, _: &EmbeddingModel) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TrainReport {
    /// Summed batch loss per epoch.
    pub epoch_losses: Vec<f64>,
    pub sampling_warnings: usize,
    pub checkpoints: Vec<usize>,
}

/// Plain mini-batch SGD over the train split.
pub fn train(
    kg: &KnowledgeGraph,
    cfg: &TrainConfig,
    sink: &mut dyn CheckpointSink,
) -> Result<(EmbeddingModel, TrainReport)> {
    cfg.validate()?;
    let positives = kg.triples(Split::Train);
    if positives.is_empty() {
        return Err(EmbedError::EmptyTrainSplit);
    }
    let mut model = EmbeddingModel::init(
        cfg.kind,
        cfg.dim,
        kg.num_entities(),
        kg.num_relations(),
        cfg.seed,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_cafe_f00d_d00d);
    let mut order: Vec<usize> = (0..positives.len()).collect();
    let loss_cfg = cfg.loss();
    let mut report = TrainReport::default();
    let mut stats = SamplingStats::default();

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<Example> = chunk
                .iter()
                .map(|&i| {
                    let positive = positives[i];
                    Example {
                        positive,
                        negatives: sample_negatives(
                            kg,
                            positive,
                            cfg.negatives_per_positive,
                            &mut rng,
                            &mut stats,
                        ),
                    }
                })
                .collect();
            let (loss, grad) = if cfg.shards > 1 {
                loss_and_gradient_sharded(&model, &batch, &loss_cfg, cfg.shards)
            } else {
                loss_and_gradient(&model, &batch, &loss_cfg)
            };
            if !loss.is_finite() || !grad.is_finite() {
                return Err(EmbedError::NonFinite { epoch, batch: b });
            }
            grad.apply(&mut model, cfg.learning_rate);
            epoch_loss += loss;
        }
        if cfg.kind == ModelKind::TransE {
            model.project_entities_to_unit_ball();
        }
        if !model.is_finite() {
            return Err(EmbedError::NonFinite {
                epoch,
                batch: order.len().div_ceil(cfg.batch_size),
            });
        }
        report.epoch_losses.push(epoch_loss);
        if epoch % cfg.checkpoint_every == 0 {
            sink.save(epoch, &model)?;
            report.checkpoints.push(epoch);
        }
    }
    report.sampling_warnings = stats.warnings;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> KnowledgeGraph {
        let mut kg = KnowledgeGraph::new();
        for i in 0..n {
            kg.add_labeled(
                &format!("e{i}"),
                "next",
                &format!("e{}", (i + 1) % n),
                Split::Train,
            )
            .unwrap();
        }
        kg
    }

    #[test]
    fn zero_epochs_returns_init() {
        let kg = ring(10);
        let mut cfg = TrainConfig::new(ModelKind::DistMult, 8);
        cfg.epochs = 0;
        cfg.seed = 4;
        let (m, report) = train(&kg, &cfg, &mut NoCheckpoints).unwrap();
        assert_eq!(m, EmbeddingModel::init(ModelKind::DistMult, 8, 10, 1, 4));
        assert!(report.epoch_losses.is_empty());
    }

    #[test]
    fn rejects_bad_checkpoint_interval() {
        let kg = ring(5);
        let mut cfg = TrainConfig::new(ModelKind::TransE, 4);
        cfg.epochs = 10;
        cfg.checkpoint_every = 3;
        assert!(matches!(
            train(&kg, &cfg, &mut NoCheckpoints),
            Err(EmbedError::Config(_))
        ));
    }

    #[test]
    fn empty_train_split() {
        let mut kg = KnowledgeGraph::new();
        kg.add_labeled("a", "r", "b", Split::Test).unwrap();
        let cfg = TrainConfig::new(ModelKind::TransE, 4);
        assert!(matches!(
            train(&kg, &cfg, &mut NoCheckpoints),
            Err(EmbedError::EmptyTrainSplit)
        ));
    }

    #[test]
    fn divergence_is_reported_with_epoch() {
        let kg = ring(10);
        let mut cfg = TrainConfig::new(ModelKind::DistMult, 8);
        cfg.learning_rate = 1e200;
        cfg.epochs = 5;
        cfg.checkpoint_every = 5;
        match train(&kg, &cfg, &mut NoCheckpoints) {
            Err(EmbedError::NonFinite { epoch, .. }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn checkpoints_and_invariants() {
        let kg = ring(12);
        for kind in ModelKind::ALL {
            let mut cfg = TrainConfig::new(kind, 6);
            cfg.epochs = 10;
            cfg.checkpoint_every = 5;
            cfg.batch_size = 4;
            let mut sink = MemorySink::default();
            let (m, report) = train(&kg, &cfg, &mut sink).unwrap();
            assert_eq!(report.checkpoints, vec![5, 10]);
            assert_eq!(sink.checkpoints.len(), 2);
            assert_eq!(sink.checkpoints[1].1, m);
            assert!(m.is_finite());
            if kind == ModelKind::TransE {
                for (_, ck) in &sink.checkpoints {
                    for row in ck.entity.iter_rows() {
                        assert!(row.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1.0 + 1e-9);
                    }
                }
            }
        }
    }
}
