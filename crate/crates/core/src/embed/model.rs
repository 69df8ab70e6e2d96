use super::{EmbedError, Result};
use crate::kg::{EntityId, RelationId, Triple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    TransE,
    DistMult,
    ComplEx,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::TransE => "transe",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx => "complex",
        }
    }

    pub fn is_complex(self) -> bool {
        self == ModelKind::ComplEx
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            ModelKind::TransE => 0,
            ModelKind::DistMult => 1,
            ModelKind::ComplEx => 2,
        }
    }

    pub(crate) fn from_code(c: u32) -> Option<Self> {
        match c {
            0 => Some(ModelKind::TransE),
            1 => Some(ModelKind::DistMult),
            2 => Some(ModelKind::ComplEx),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transe" => Ok(ModelKind::TransE),
            "distmult" => Ok(ModelKind::DistMult),
            "complex" => Ok(ModelKind::ComplEx),
            o => Err(EmbedError::Config(format!("unknown model `{o}`"))),
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix shape mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }
}

/// Which parameter table a row lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Table {
    Entity,
    EntityIm,
    Relation,
    RelationIm,
}

/// Entity and relation embeddings for one model kind. ComplEx keeps real
/// and imaginary parts in separate matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub kind: ModelKind,
    pub dim: usize,
    pub seed: u64,
    pub entity: Matrix,
    pub entity_im: Option<Matrix>,
    pub relation: Matrix,
    pub relation_im: Option<Matrix>,
}

impl EmbeddingModel {
    /// Entries i.i.d. uniform in `[-6/sqrt(dim), 6/sqrt(dim)]`.
    pub fn init(
        kind: ModelKind,
        dim: usize,
        num_entities: usize,
        num_relations: usize,
        seed: u64,
    ) -> Self {
        assert!(dim > 0, "dim must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 6.0 / (dim as f64).sqrt();
        let mut fill = |rows: usize| {
            let data = (0..rows * dim)
                .map(|_| rng.gen_range(-bound..=bound))
                .collect();
            Matrix::from_vec(rows, dim, data)
        };
        let entity = fill(num_entities);
        let entity_im = kind.is_complex().then(|| fill(num_entities));
        let relation = fill(num_relations);
        let relation_im = kind.is_complex().then(|| fill(num_relations));
        Self {
            kind,
            dim,
            seed,
            entity,
            entity_im,
            relation,
            relation_im,
        }
    }

    /// Zero-initialised model with the given shape.
    pub fn zeros(kind: ModelKind, dim: usize, num_entities: usize, num_relations: usize) -> Self {
        Self {
            kind,
            dim,
            seed: 0,
            entity: Matrix::zeros(num_entities, dim),
            entity_im: kind.is_complex().then(|| Matrix::zeros(num_entities, dim)),
            relation: Matrix::zeros(num_relations, dim),
            relation_im: kind.is_complex().then(|| Matrix::zeros(num_relations, dim)),
        }
    }

    pub fn num_entities(&self) -> usize {
        self.entity.rows()
    }

    pub fn num_relations(&self) -> usize {
        self.relation.rows()
    }

    pub fn table(&self, t: Table) -> Option<&Matrix> {
        match t {
            Table::Entity => Some(&self.entity),
            Table::EntityIm => self.entity_im.as_ref(),
            Table::Relation => Some(&self.relation),
            Table::RelationIm => self.relation_im.as_ref(),
        }
    }

    pub fn table_mut(&mut self, t: Table) -> Option<&mut Matrix> {
        match t {
            Table::Entity => Some(&mut self.entity),
            Table::EntityIm => self.entity_im.as_mut(),
            Table::Relation => Some(&mut self.relation),
            Table::RelationIm => self.relation_im.as_mut(),
        }
    }

    pub fn tables(&self) -> Vec<Table> {
        if self.kind.is_complex() {
            vec![
                Table::Entity,
                Table::EntityIm,
                Table::Relation,
                Table::RelationIm,
            ]
        } else {
            vec![Table::Entity, Table::Relation]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tables().into_iter().all(|t| {
            self.table(t)
                .is_some_and(|m| m.as_slice().iter().all(|x| x.is_finite()))
        })
    }

    fn check(&self, t: Triple) -> Result<()> {
        if t.head.index() >= self.num_entities() {
            return Err(EmbedError::OutOfRange(format!("entity {}", t.head)));
        }
        if t.tail.index() >= self.num_entities() {
            return Err(EmbedError::OutOfRange(format!("entity {}", t.tail)));
        }
        if t.relation.index() >= self.num_relations() {
            return Err(EmbedError::OutOfRange(format!("relation {}", t.relation)));
        }
        Ok(())
    }

    fn expect_kind(&self, kind: ModelKind) -> Result<()> {
        if self.kind != kind {
            return Err(EmbedError::Config(format!(
                "model is {}, not {kind}",
                self.kind
            )));
        }
        Ok(())
    }

    /// `-‖e_h + e_r − e_t‖₂`
    pub fn score_transe(&self, t: Triple) -> Result<f64> {
        self.expect_kind(ModelKind::TransE)?;
        self.check(t)?;
        Ok(self.score_unchecked(t.head, t.relation, t.tail))
    }

    /// `Σ e_h[i]·e_r[i]·e_t[i]`
    pub fn score_distmult(&self, t: Triple) -> Result<f64> {
        self.expect_kind(ModelKind::DistMult)?;
        self.check(t)?;
        Ok(self.score_unchecked(t.head, t.relation, t.tail))
    }

    /// `Re(Σ e_r[i]·e_h[i]·conj(e_t[i]))`
    pub fn score_complex(&self, t: Triple) -> Result<f64> {
        self.expect_kind(ModelKind::ComplEx)?;
        self.check(t)?;
        Ok(self.score_unchecked(t.head, t.relation, t.tail))
    }

    pub fn score(&self, t: Triple) -> Result<f64> {
        self.check(t)?;
        Ok(self.score_unchecked(t.head, t.relation, t.tail))
    }

    /// Score with indices assumed in range.
    pub fn score_unchecked(&self, h: EntityId, r: RelationId, t: EntityId) -> f64 {
        let (h, r, t) = (h.index(), r.index(), t.index());
        match self.kind {
            ModelKind::TransE => {
                transe(self.entity.row(h), self.relation.row(r), self.entity.row(t))
            }
            ModelKind::DistMult => {
                distmult(self.entity.row(h), self.relation.row(r), self.entity.row(t))
            }
            ModelKind::ComplEx => {
                let (ei, ri) = (
                    self.entity_im.as_ref().unwrap(),
                    self.relation_im.as_ref().unwrap(),
                );
                complex(
                    (self.entity.row(h), ei.row(h)),
                    (self.relation.row(r), ri.row(r)),
                    (self.entity.row(t), ei.row(t)),
                )
            }
        }
    }

    /// Projects every entity vector with norm above 1 onto the unit sphere.
    pub fn project_entities_to_unit_ball(&mut self) {
        let dim = self.dim;
        for row in self.entity.as_mut_slice().chunks_mut(dim) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }
}

pub fn transe(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    -h.iter()
        .zip(r)
        .zip(t)
        .map(|((h, r), t)| {
            let d = h + r - t;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn distmult(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    h.iter().zip(r).zip(t).map(|((h, r), t)| r * (h * t)).sum()
}

/// `(re, im)` slices for head, relation and tail.
pub fn complex(h: (&[f64], &[f64]), r: (&[f64], &[f64]), t: (&[f64], &[f64])) -> f64 {
    let mut s = 0.0;
    for i in 0..h.0.len() {
        let (hr, hi) = (h.0[i], h.1[i]);
        let (rr, ri) = (r.0[i], r.1[i]);
        let (tr, ti) = (t.0[i], t.1[i]);
        s += rr * (hr * tr) + rr * (hi * ti) + ri * (hr * ti) - ri * (hi * tr);
    }
    s
}
