//! Training objectives and their analytic gradients.
//!
//! * TransE: margin ranking `Σ max(0, margin − ψ(pos) + ψ(neg))`.
//! * DistMult / ComplEx: logistic `Σ log(1 + exp(−y·ψ))` with `y = ±1`,
//!   plus `λ‖θ‖²` over the embedding rows of every scored triple.
//!
//! Losses are sums over the batch, not means.

use super::model::{EmbeddingModel, ModelKind, Table};
use crate::kg::Triple;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub margin: f64,
    pub regularization: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            margin: 1.0,
            regularization: 1e-4,
        }
    }
}

/// One positive triple with its corrupted counterparts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub positive: Triple,
    pub negatives: Vec<Triple>,
}

/// Sparse gradient keyed by parameter row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradient {
    rows: BTreeMap<(Table, usize), Vec<f64>>,
}

impl Gradient {
    fn row(&mut self, table: Table, row: usize, dim: usize) -> &mut Vec<f64> {
        self.rows
            .entry((table, row))
            .or_insert_with(|| vec![0.0; dim])
    }

    fn axpy(&mut self, table: Table, row: usize, scale: f64, v: &[f64]) {
        let g = self.row(table, row, v.len());
        for (g, x) in g.iter_mut().zip(v) {
            *g += scale * x;
        }
    }

    /// Gradient entry, zero for untouched rows.
    pub fn get(&self, table: Table, row: usize, col: usize) -> f64 {
        self.rows.get(&(table, row)).map_or(0.0, |r| r[col])
    }

    pub fn touched(&self) -> impl Iterator<Item = (Table, usize)> + '_ {
        self.rows.keys().copied()
    }

    pub fn merge(&mut self, other: Gradient) {
        for (k, v) in other.rows {
            match self.rows.get_mut(&k) {
                Some(g) => g.iter_mut().zip(&v).for_each(|(a, b)| *a += b),
                None => {
                    self.rows.insert(k, v);
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rows.values().flatten().all(|x| x.is_finite())
    }

    /// `θ ← θ − lr·g`
    pub fn apply(&self, model: &mut EmbeddingModel, lr: f64) {
        for (&(table, row), g) in &self.rows {
            let m = model
                .table_mut(table)
                .expect("gradient table exists in model");
            for (p, g) in m.row_mut(row).iter_mut().zip(g) {
                *p -= lr * g;
            }
        }
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Loss of a batch without gradient.
pub fn batch_loss(model: &EmbeddingModel, batch: &[Example], cfg: &LossConfig) -> f64 {
    accumulate(model, batch, cfg, None)
}

/// Loss and gradient of a batch.
pub fn loss_and_gradient(
    model: &EmbeddingModel,
    batch: &[Example],
    cfg: &LossConfig,
) -> (f64, Gradient) {
    let mut g = Gradient::default();
    let loss = accumulate(model, batch, cfg, Some(&mut g));
    (loss, g)
}

/// Same as [`loss_and_gradient`], with the batch split into `shards`
/// evaluated concurrently and merged in shard order.
pub fn loss_and_gradient_sharded(
    model: &EmbeddingModel,
    batch: &[Example],
    cfg: &LossConfig,
    shards: usize,
) -> (f64, Gradient) {
    let chunk = batch.len().div_ceil(shards.max(1)).max(1);
    let parts: Vec<(f64, Gradient)> = batch
        .par_chunks(chunk)
        .map(|c| loss_and_gradient(model, c, cfg))
        .collect();
    let mut loss = 0.0;
    let mut g = Gradient::default();
    for (l, pg) in parts {
        loss += l;
        g.merge(pg);
    }
    (loss, g)
}

fn accumulate(
    model: &EmbeddingModel,
    batch: &[Example],
    cfg: &LossConfig,
    mut grad: Option<&mut Gradient>,
) -> f64 {
    let mut loss = 0.0;
    for ex in batch {
        match model.kind {
            ModelKind::TransE => {
                let pos = transe_parts(model, ex.positive);
                for &n in &ex.negatives {
                    let neg = transe_parts(model, n);
                    // margin − ψ(pos) + ψ(neg) with ψ = −‖d‖
                    let l = cfg.margin + pos.norm - neg.norm;
                    if l > 0.0 {
                        loss += l;
                        if let Some(g) = grad.as_deref_mut() {
                            pos.backprop(g, ex.positive, 1.0);
                            neg.backprop(g, n, -1.0);
                        }
                    }
                }
            }
            ModelKind::DistMult | ModelKind::ComplEx => {
                loss += logistic(model, ex.positive, 1.0, cfg, grad.as_deref_mut());
                for &n in &ex.negatives {
                    loss += logistic(model, n, -1.0, cfg, grad.as_deref_mut());
                }
            }
        }
    }
    loss
}

struct TransEParts {
    diff: Vec<f64>,
    norm: f64,
}

fn transe_parts(m: &EmbeddingModel, t: Triple) -> TransEParts {
    let (h, r, tl) = (
        m.entity.row(t.head.index()),
        m.relation.row(t.relation.index()),
        m.entity.row(t.tail.index()),
    );
    let diff: Vec<f64> = (0..m.dim).map(|i| h[i] + r[i] - tl[i]).collect();
    let norm = sq(&diff).sqrt();
    TransEParts { diff, norm }
}

impl TransEParts {
    /// Adds `sign · ∂‖d‖/∂θ`.
    fn backprop(&self, g: &mut Gradient, t: Triple, sign: f64) {
        if self.norm == 0.0 {
            return;
        }
        let s = sign / self.norm;
        g.axpy(Table::Entity, t.head.index(), s, &self.diff);
        g.axpy(Table::Relation, t.relation.index(), s, &self.diff);
        g.axpy(Table::Entity, t.tail.index(), -s, &self.diff);
    }
}

fn logistic(
    m: &EmbeddingModel,
    t: Triple,
    y: f64,
    cfg: &LossConfig,
    grad: Option<&mut Gradient>,
) -> f64 {
    let (hi, ri, ti) = (t.head.index(), t.relation.index(), t.tail.index());
    let psi = m.score_unchecked(t.head, t.relation, t.tail);
    let lambda = cfg.regularization;
    let mut reg = sq(m.entity.row(hi)) + sq(m.relation.row(ri)) + sq(m.entity.row(ti));
    if let (Some(ei), Some(rim)) = (&m.entity_im, &m.relation_im) {
        reg += sq(ei.row(hi)) + sq(rim.row(ri)) + sq(ei.row(ti));
    }
    let loss = softplus(-y * psi) + lambda * reg;

    let Some(g) = grad else { return loss };
    let dpsi = -y * sigmoid(-y * psi);
    let dim = m.dim;
    let (h, r, tl) = (m.entity.row(hi), m.relation.row(ri), m.entity.row(ti));
    match m.kind {
        ModelKind::DistMult => {
            let gh: Vec<f64> = (0..dim)
                .map(|i| dpsi * r[i] * tl[i] + 2.0 * lambda * h[i])
                .collect();
            let gr: Vec<f64> = (0..dim)
                .map(|i| dpsi * h[i] * tl[i] + 2.0 * lambda * r[i])
                .collect();
            let gt: Vec<f64> = (0..dim)
                .map(|i| dpsi * h[i] * r[i] + 2.0 * lambda * tl[i])
                .collect();
            g.axpy(Table::Entity, hi, 1.0, &gh);
            g.axpy(Table::Relation, ri, 1.0, &gr);
            g.axpy(Table::Entity, ti, 1.0, &gt);
        }
        ModelKind::ComplEx => {
            let (ei, rim) = (
                m.entity_im.as_ref().unwrap(),
                m.relation_im.as_ref().unwrap(),
            );
            let (hm, rm, tm) = (ei.row(hi), rim.row(ri), ei.row(ti));
            let l2 = 2.0 * lambda;
            let ghr: Vec<f64> = (0..dim)
                .map(|i| dpsi * (r[i] * tl[i] + rm[i] * tm[i]) + l2 * h[i])
                .collect();
            let ghi: Vec<f64> = (0..dim)
                .map(|i| dpsi * (r[i] * tm[i] - rm[i] * tl[i]) + l2 * hm[i])
                .collect();
            let gtr: Vec<f64> = (0..dim)
                .map(|i| dpsi * (r[i] * h[i] - rm[i] * hm[i]) + l2 * tl[i])
                .collect();
            let gti: Vec<f64> = (0..dim)
                .map(|i| dpsi * (r[i] * hm[i] + rm[i] * h[i]) + l2 * tm[i])
                .collect();
            let grr: Vec<f64> = (0..dim)
                .map(|i| dpsi * (h[i] * tl[i] + hm[i] * tm[i]) + l2 * r[i])
                .collect();
            let gri: Vec<f64> = (0..dim)
                .map(|i| dpsi * (h[i] * tm[i] - hm[i] * tl[i]) + l2 * rm[i])
                .collect();
            g.axpy(Table::Entity, hi, 1.0, &ghr);
            g.axpy(Table::EntityIm, hi, 1.0, &ghi);
            g.axpy(Table::Entity, ti, 1.0, &gtr);
            g.axpy(Table::EntityIm, ti, 1.0, &gti);
            g.axpy(Table::Relation, ri, 1.0, &grr);
            g.axpy(Table::RelationIm, ri, 1.0, &gri);
        }
        ModelKind::TransE => unreachable!("TransE uses the margin loss"),
    }
    loss
}
