use super::labels::{stratified_folds, LabeledEntities};
use super::{ClassifyError, Result};
use crate::kg::EntityId;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A family of classifiers indexed by candidate hyperparameters. Fitting
/// only ever sees the training pairs and the ids of the entities to predict.
pub trait CandidateSpace: Sync {
    type Candidate: Clone + Send + Sync + Serialize;

    fn candidates(&self) -> Vec<Self::Candidate>;

    /// Whether `c` can be fitted on `train_size` examples.
    fn admissible(&self, _c: &Self::Candidate, _train_size: usize) -> bool {
        true
    }

    fn fit_predict(
        &self,
        c: &Self::Candidate,
        train: &[(EntityId, u32)],
        test: &[EntityId],
    ) -> Result<Vec<u32>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Selected hyperparameters as JSON.
    pub chosen: serde_json::Value,
    /// Inner cross-validation accuracy of the selected candidate.
    pub inner_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: Vec<FoldResult>,
    /// Correct over total across all folds, i.e. the fold-size weighted mean.
    pub mean_accuracy: f64,
}

impl CvResult {
    pub fn from_folds(folds: Vec<FoldResult>) -> Self {
        let (c, n) = folds
            .iter()
            .fold((0, 0), |(c, n), f| (c + f.correct, n + f.size));
        Self {
            mean_accuracy: if n == 0 { 0.0 } else { c as f64 / n as f64 },
            folds,
        }
    }

    /// Builds a result from per-fold accuracies alone, with folds numbered from 0.
    pub fn from_accuracies(accuracies: &[f64]) -> Self {
        let folds: Vec<FoldResult> = accuracies
            .iter()
            .enumerate()
            .map(|(fold, &accuracy)| FoldResult {
                fold,
                size: 0,
                correct: 0,
                accuracy,
                chosen: serde_json::Value::Null,
                inner_accuracy: None,
            })
            .collect();
        let mean = accuracies.iter().sum::<f64>() / accuracies.len().max(1) as f64;
        Self {
            folds,
            mean_accuracy: mean,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub inner_folds: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            inner_folds: 3,
            seed: 0,
            parallel: true,
        }
    }
}

fn count_correct(pred: &[u32], truth: &[u32]) -> usize {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count()
}

fn split(
    items: &[(EntityId, u32)],
    folds: &[usize],
    f: usize,
) -> (Vec<(EntityId, u32)>, Vec<(EntityId, u32)>) {
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (&item, &g) in items.iter().zip(folds) {
        if g == f {
            test.push(item);
        } else {
            train.push(item);
        }
    }
    (train, test)
}

fn evaluate<S: CandidateSpace>(
    space: &S,
    c: &S::Candidate,
    train: &[(EntityId, u32)],
    test: &[(EntityId, u32)],
) -> Result<usize> {
    let ids: Vec<EntityId> = test.iter().map(|p| p.0).collect();
    let truth: Vec<u32> = test.iter().map(|p| p.1).collect();
    let pred = space.fit_predict(c, train, &ids)?;
    Ok(count_correct(&pred, &truth))
}

/// Inner-loop selection on `train` only: returns the best candidate and its
/// inner accuracy. Candidates tie-break by their order in the space.
fn select<S: CandidateSpace>(
    space: &S,
    train: &[(EntityId, u32)],
    cfg: &CvConfig,
    seed: u64,
) -> Result<(S::Candidate, Option<f64>)> {
    let cands = space.candidates();
    if cands.len() == 1 {
        return Ok((cands[0].clone(), None));
    }
    let classes: Vec<u32> = train.iter().map(|p| p.1).collect();
    let inner = stratified_folds(&classes, cfg.inner_folds, seed);
    let mut best: Option<(S::Candidate, f64)> = None;
    for c in cands {
        let mut correct = 0;
        let mut total = 0;
        let mut ok = true;
        for f in 0..cfg.inner_folds {
            let (tr, te) = split(train, &inner, f);
            if te.is_empty() {
                continue;
            }
            if !space.admissible(&c, tr.len()) {
                ok = false;
                break;
            }
            correct += evaluate(space, &c, &tr, &te)?;
            total += te.len();
        }
        if !ok || total == 0 {
            continue;
        }
        let acc = correct as f64 / total as f64;
        if best.as_ref().is_none_or(|(_, b)| acc > *b) {
            best = Some((c, acc));
        }
    }
    let (c, acc) = best.ok_or_else(|| {
        ClassifyError::Config("no candidate is admissible for the inner folds".into())
    })?;
    Ok((c, Some(acc)))
}

/// Nested cross-validation over the given outer folds.
pub fn nested_cv<S: CandidateSpace>(
    space: &S,
    labels: &LabeledEntities,
    outer: &[usize],
    cfg: &CvConfig,
) -> Result<CvResult> {
    if outer.len() != labels.len() {
        return Err(ClassifyError::Config(format!(
            "{} fold ids for {} labeled entities",
            outer.len(),
            labels.len()
        )));
    }
    if cfg.inner_folds < 2 {
        return Err(ClassifyError::Config(
            "at least 2 inner folds are required".into(),
        ));
    }
    let mut fold_ids: Vec<usize> = outer.to_vec();
    fold_ids.sort_unstable();
    fold_ids.dedup();
    if fold_ids.len() < 2 {
        return Err(ClassifyError::Config(
            "at least 2 outer folds are required".into(),
        ));
    }
    let items = labels.pairs();
    let run = |&f: &usize| -> Result<FoldResult> {
        let (train, test) = split(&items, outer, f);
        let (c, inner_accuracy) = select(
            space,
            &train,
            cfg,
            cfg.seed ^ (f as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        )?;
        if !space.admissible(&c, train.len()) {
            return Err(ClassifyError::Config(format!(
                "selected candidate is not admissible for outer fold {f}"
            )));
        }
        let correct = evaluate(space, &c, &train, &test)?;
        Ok(FoldResult {
            fold: f,
            size: test.len(),
            correct,
            accuracy: correct as f64 / test.len() as f64,
            chosen: serde_json::to_value(&c).unwrap_or(serde_json::Value::Null),
            inner_accuracy,
        })
    };
    let folds: Vec<FoldResult> = if cfg.parallel {
        fold_ids.par_iter().map(run).collect::<Result<_>>()?
    } else {
        fold_ids.iter().map(run).collect::<Result<_>>()?
    };
    Ok(CvResult::from_folds(folds))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyDifference {
    pub per_fold: Vec<f64>,
    /// Mean of the per-fold differences.
    pub mean: f64,
}

/// `distributional − symbolic` per fold; positive favours the distributional side.
pub fn accuracy_difference(
    distributional: &CvResult,
    symbolic: &CvResult,
) -> Result<AccuracyDifference> {
    let a: Vec<usize> = distributional.folds.iter().map(|f| f.fold).collect();
    let b: Vec<usize> = symbolic.folds.iter().map(|f| f.fold).collect();
    if a != b || a.is_empty() {
        return Err(ClassifyError::FoldMismatch(format!("{a:?} vs {b:?}")));
    }
    let sizes_differ = distributional
        .folds
        .iter()
        .zip(&symbolic.folds)
        .any(|(x, y)| x.size != y.size);
    if sizes_differ {
        return Err(ClassifyError::FoldMismatch("fold sizes differ".into()));
    }
    let per_fold: Vec<f64> = distributional
        .folds
        .iter()
        .zip(&symbolic.folds)
        .map(|(x, y)| x.accuracy - y.accuracy)
        .collect();
    let mean = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
    Ok(AccuracyDifference { per_fold, mean })
}
