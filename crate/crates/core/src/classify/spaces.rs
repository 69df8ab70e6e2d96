//! Candidate spaces for nested cross-validation: kNN over embedding
//! checkpoints, and a rule-theory classifier.

use super::cv::CandidateSpace;
use super::knn::{knn_classify, Weighting, K_GRID};
use super::labels::majority_class;
use super::{ClassifyError, Result};
use crate::embed::{
    export_features, read_checkpoint, train, EmbeddingModel, Matrix, MemorySink, ModelKind,
    TrainConfig,
};
use crate::eval::Scorer;
use crate::kg::{EntityId, KnowledgeGraph, Split, Triple};
use crate::symbolic::{mine_rules, Aggregation, MiningConfig, RuleScorer};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Embedding checkpoints keyed by (model, dimension, epoch).
#[derive(Debug, Clone, Default)]
pub struct CheckpointStore {
    models: BTreeMap<(ModelKind, usize, usize), EmbeddingModel>,
}

impl CheckpointStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, epoch: usize, model: EmbeddingModel) {
        self.models.insert((model.kind, model.dim, epoch), model);
    }

    pub fn get(&self, kind: ModelKind, dim: usize, epoch: usize) -> Result<&EmbeddingModel> {
        self.models
            .get(&(kind, dim, epoch))
            .ok_or(ClassifyError::MissingCheckpoint { kind, dim, epoch })
    }

    pub fn cells(&self) -> impl Iterator<Item = (ModelKind, usize, usize)> + '_ {
        self.models.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Loads every `*.kge` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut store = Self::new();
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "kge"))
            .collect();
        paths.sort();
        for p in paths {
            let mut f = std::io::BufReader::new(std::fs::File::open(&p)?);
            let (model, epoch) = read_checkpoint(&mut f)?;
            store.insert(epoch, model);
        }
        Ok(store)
    }

    /// Trains one model per dimension and keeps all of its checkpoints.
    pub fn train_grid(kg: &KnowledgeGraph, base: &TrainConfig, dims: &[usize]) -> Result<Self> {
        let mut store = Self::new();
        for &dim in dims {
            let cfg = TrainConfig {
                dim,
                ..base.clone()
            };
            let mut sink = MemorySink::default();
            train(kg, &cfg, &mut sink)?;
            for (epoch, model) in sink.checkpoints {
                store.insert(epoch, model);
            }
        }
        Ok(store)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbeddingCandidate {
    pub model: ModelKind,
    pub dim: usize,
    pub epoch: usize,
    pub k: usize,
    pub weighting: Weighting,
}

/// kNN over entity embeddings, searching dimension, checkpoint epoch, k and
/// weighting.
pub struct EmbeddingSpace<'a> {
    pub store: &'a CheckpointStore,
    pub kind: ModelKind,
    pub dims: Vec<usize>,
    pub epochs: Vec<usize>,
    pub ks: Vec<usize>,
    pub weightings: Vec<Weighting>,
}

impl<'a> EmbeddingSpace<'a> {
    /// Every stored (dim, epoch) cell of `kind` with the full kNN grid.
    pub fn full_grid(store: &'a CheckpointStore, kind: ModelKind) -> Self {
        let mut dims: Vec<usize> = store.cells().filter(|c| c.0 == kind).map(|c| c.1).collect();
        let mut epochs: Vec<usize> = store.cells().filter(|c| c.0 == kind).map(|c| c.2).collect();
        dims.dedup();
        epochs.sort_unstable();
        epochs.dedup();
        Self {
            store,
            kind,
            dims,
            epochs,
            ks: K_GRID.to_vec(),
            weightings: Weighting::ALL.to_vec(),
        }
    }
}

impl CandidateSpace for EmbeddingSpace<'_> {
    type Candidate = EmbeddingCandidate;

    fn candidates(&self) -> Vec<EmbeddingCandidate> {
        let mut out = Vec::new();
        for &dim in &self.dims {
            for &epoch in &self.epochs {
                for &k in &self.ks {
                    for &weighting in &self.weightings {
                        out.push(EmbeddingCandidate {
                            model: self.kind,
                            dim,
                            epoch,
                            k,
                            weighting,
                        });
                    }
                }
            }
        }
        out
    }

    fn admissible(&self, c: &EmbeddingCandidate, train_size: usize) -> bool {
        c.k <= train_size
    }

    fn fit_predict(
        &self,
        c: &EmbeddingCandidate,
        train: &[(EntityId, u32)],
        test: &[EntityId],
    ) -> Result<Vec<u32>> {
        let model = self.store.get(c.model, c.dim, c.epoch)?;
        let ids: Vec<EntityId> = train.iter().map(|p| p.0).collect();
        let labels: Vec<u32> = train.iter().map(|p| p.1).collect();
        let rows = |m: Matrix| m.iter_rows().map(<[f64]>::to_vec).collect::<Vec<_>>();
        let tr = rows(export_features(model, &ids)?);
        let te = rows(export_features(model, test)?);
        knn_classify(&tr, &labels, &te, c.k, c.weighting)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnnCandidate {
    pub k: usize,
    pub weighting: Weighting,
}

/// kNN over a fixed feature matrix whose row `i` belongs to entity `i`.
pub struct FeatureSpace<'a> {
    pub features: &'a Matrix,
    pub ks: Vec<usize>,
    pub weightings: Vec<Weighting>,
}

impl<'a> FeatureSpace<'a> {
    pub fn full_grid(features: &'a Matrix) -> Self {
        Self {
            features,
            ks: K_GRID.to_vec(),
            weightings: Weighting::ALL.to_vec(),
        }
    }

    fn rows(&self, ids: &[EntityId]) -> Result<Vec<Vec<f64>>> {
        ids.iter()
            .map(|e| {
                if e.index() < self.features.rows() {
                    Ok(self.features.row(e.index()).to_vec())
                } else {
                    Err(ClassifyError::Config(format!(
                        "no feature row for entity {e}"
                    )))
                }
            })
            .collect()
    }
}

impl CandidateSpace for FeatureSpace<'_> {
    type Candidate = KnnCandidate;

    fn candidates(&self) -> Vec<KnnCandidate> {
        self.ks
            .iter()
            .flat_map(|&k| {
                self.weightings
                    .iter()
                    .map(move |&weighting| KnnCandidate { k, weighting })
            })
            .collect()
    }

    fn admissible(&self, c: &KnnCandidate, train_size: usize) -> bool {
        c.k <= train_size
    }

    fn fit_predict(
        &self,
        c: &KnnCandidate,
        train: &[(EntityId, u32)],
        test: &[EntityId],
    ) -> Result<Vec<u32>> {
        let ids: Vec<EntityId> = train.iter().map(|p| p.0).collect();
        let labels: Vec<u32> = train.iter().map(|p| p.1).collect();
        knn_classify(
            &self.rows(&ids)?,
            &labels,
            &self.rows(test)?,
            c.k,
            c.weighting,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleCandidate {
    pub max_body_len: usize,
}

/// Mines rules for a fresh label relation whose train facts are the
/// training labels, then predicts the class with the highest scoring rule,
/// falling back to the training majority.
pub struct RuleSpace<'a> {
    /// Graph without any label triples.
    pub kg: &'a KnowledgeGraph,
    pub num_classes: usize,
    pub lengths: Vec<usize>,
}

pub const LABEL_RELATION: &str = "__label__";

fn class_entity(c: u32) -> String {
    format!("__class__{c}")
}

impl RuleSpace<'_> {
    pub fn predict(
        &self,
        max_body_len: usize,
        train: &[(EntityId, u32)],
        test: &[EntityId],
    ) -> Result<Vec<u32>> {
        let mut kg = self.kg.clone();
        let mut rel_name = LABEL_RELATION.to_owned();
        while kg.relation(&rel_name).is_some() {
            rel_name.push('_');
        }
        let rel = kg.intern_relation(&rel_name);
        let classes: Vec<EntityId> = (0..self.num_classes as u32)
            .map(|c| kg.intern_entity(&class_entity(c)))
            .collect();
        for &(e, c) in train {
            kg.add(Triple::new(e, rel, classes[c as usize]), Split::Train)
                .map_err(|err| ClassifyError::Labels(err.to_string()))?;
        }
        let theory = mine_rules(
            &kg,
            rel,
            &MiningConfig {
                max_body_len,
                parallel: false,
                ..MiningConfig::default()
            },
        )?;
        let scorer = RuleScorer::new(&kg, &[theory], Aggregation::Max)?;
        let labels: Vec<u32> = train.iter().map(|p| p.1).collect();
        let fallback = majority_class(&labels).ok_or(ClassifyError::EmptyTrainingSet)?;
        Ok(test
            .iter()
            .map(|&e| {
                let mut best = (0.0, fallback);
                for (c, &ce) in classes.iter().enumerate() {
                    let s = scorer.score(e, rel, ce);
                    if s > best.0 {
                        best = (s, c as u32);
                    }
                }
                best.1
            })
            .collect())
    }
}

impl CandidateSpace for RuleSpace<'_> {
    type Candidate = RuleCandidate;

    fn candidates(&self) -> Vec<RuleCandidate> {
        self.lengths
            .iter()
            .map(|&max_body_len| RuleCandidate { max_body_len })
            .collect()
    }

    fn fit_predict(
        &self,
        c: &RuleCandidate,
        train: &[(EntityId, u32)],
        test: &[EntityId],
    ) -> Result<Vec<u32>> {
        self.predict(c.max_body_len, train, test)
    }
}
