//! Indexed triple store with entity/relation vocabularies and train/valid/test
//! splits.
//!
//! A [`KnowledgeGraph`] is built incrementally through the `ingest_*`
//! methods and is read-only afterwards. Every split keeps its triples in
//! insertion order together with per-relation adjacency (head → tails and
//! tail → heads). The union of all splits forms the known-true set used for
//! filtered negative sampling and filtered ranking.

mod hyper;
mod io;
mod project;
mod vocab;

pub use hyper::{parse_hyperfact, HyperFact, LabeledTriple, Reifier};
pub use project::{project_graph, GraphMode};
pub use vocab::{DenseId, EntityId, RelationId, Vocab};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate triple across splits (already in {existing})")]
    DuplicateAcrossSplits { line: usize, existing: Split },
    #[error("unknown split tag `{0}`")]
    UnknownSplit(String),
    #[error("hyperfact `{0}` has arity 0")]
    EmptyFact(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid serialized graph: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = KgError> = std::result::Result<T, E>;

/// The atom `relation(head, tail)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(head: EntityId, relation: RelationId, tail: EntityId) -> Self {
        Self {
            head,
            relation,
            tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = KgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" | "validation" | "dev" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(KgError::UnknownSplit(other.to_owned())),
        }
    }
}

/// Per-relation adjacency over one split.
#[derive(Debug, Clone, Default)]
pub struct TripleIndex {
    tails: HashMap<(RelationId, EntityId), Vec<EntityId>>,
    heads: HashMap<(RelationId, EntityId), Vec<EntityId>>,
}

impl TripleIndex {
    fn insert(&mut self, t: Triple) {
        self.tails
            .entry((t.relation, t.head))
            .or_default()
            .push(t.tail);
        self.heads
            .entry((t.relation, t.tail))
            .or_default()
            .push(t.head);
    }

    /// Tails `t` with `relation(head, t)`, in insertion order.
    pub fn tails(&self, relation: RelationId, head: EntityId) -> &[EntityId] {
        self.tails
            .get(&(relation, head))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Heads `h` with `relation(h, tail)`, in insertion order.
    pub fn heads(&self, relation: RelationId, tail: EntityId) -> &[EntityId] {
        self.heads
            .get(&(relation, tail))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.tails.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub added: usize,
    pub duplicates_dropped: usize,
    pub comments_skipped: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entities: Vocab<EntityId>,
    relations: Vocab<RelationId>,
    splits: [Vec<Triple>; 3],
    indices: [TripleIndex; 3],
    known: HashMap<Triple, Split>,
    attribute_relations: BTreeSet<RelationId>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entities(&self) -> &Vocab<EntityId> {
        &self.entities
    }

    pub fn relations(&self) -> &Vocab<RelationId> {
        &self.relations
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn entity(&self, label: &str) -> Option<EntityId> {
        self.entities.get(label)
    }

    pub fn relation(&self, label: &str) -> Option<RelationId> {
        self.relations.get(label)
    }

    pub fn entity_label(&self, id: EntityId) -> &str {
        self.entities.label(id).unwrap_or("<?>")
    }

    pub fn relation_label(&self, id: RelationId) -> &str {
        self.relations.label(id).unwrap_or("<?>")
    }

    pub fn triples(&self, split: Split) -> &[Triple] {
        &self.splits[split.slot()]
    }

    pub fn index(&self, split: Split) -> &TripleIndex {
        &self.indices[split.slot()]
    }

    /// All triples of all splits, train first.
    pub fn all_triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.splits.iter().flatten()
    }

    /// Membership in the union of all splits.
    pub fn is_known(&self, t: &Triple) -> bool {
        self.known.contains_key(t)
    }

    pub fn split_of(&self, t: &Triple) -> Option<Split> {
        self.known.get(t).copied()
    }

    pub fn contains(&self, split: Split, t: &Triple) -> bool {
        self.known.get(t) == Some(&split)
    }

    pub fn num_known(&self) -> usize {
        self.known.len()
    }

    pub fn attribute_relations(&self) -> &BTreeSet<RelationId> {
        &self.attribute_relations
    }

    pub fn is_attribute(&self, r: RelationId) -> bool {
        self.attribute_relations.contains(&r)
    }

    pub fn intern_entity(&mut self, label: &str) -> EntityId {
        self.entities.intern(label)
    }

    pub fn intern_relation(&mut self, label: &str) -> RelationId {
        self.relations.intern(label)
    }

    /// Adds a triple by labels. Returns `Ok(false)` when it is already in
    /// `split` (dropped), and an error when it belongs to another split.
    pub fn add_labeled(
        &mut self,
        head: &str,
        relation: &str,
        tail: &str,
        split: Split,
    ) -> Result<bool> {
        self.add_labeled_at(head, relation, tail, split, 0)
    }

    fn add_labeled_at(
        &mut self,
        head: &str,
        relation: &str,
        tail: &str,
        split: Split,
        line: usize,
    ) -> Result<bool> {
        if let (Some(h), Some(r), Some(t)) = (
            self.entity(head),
            self.relation(relation),
            self.entity(tail),
        ) {
            return self.add_at(Triple::new(h, r, t), split, line);
        }
        let h = self.entities.intern(head);
        let r = self.relations.intern(relation);
        let t = self.entities.intern(tail);
        self.add_at(Triple::new(h, r, t), split, line)
    }

    /// Adds an id triple; ids must already be in the vocabularies.
    pub fn add(&mut self, t: Triple, split: Split) -> Result<bool> {
        self.add_at(t, split, 0)
    }

    fn add_at(&mut self, t: Triple, split: Split, line: usize) -> Result<bool> {
        if t.head.index() >= self.entities.len()
            || t.tail.index() >= self.entities.len()
            || t.relation.index() >= self.relations.len()
        {
            return Err(KgError::OutOfRange(format!("{t:?}")));
        }
        match self.known.get(&t) {
            Some(&s) if s == split => return Ok(false),
            Some(&existing) => return Err(KgError::DuplicateAcrossSplits { line, existing }),
            None => {}
        }
        self.known.insert(t, split);
        self.splits[split.slot()].push(t);
        self.indices[split.slot()].insert(t);
        Ok(true)
    }

    /// Reads tab-separated `head<TAB>relation<TAB>tail` lines into `split`.
    ///
    /// Blank lines and `#` comments are skipped. Triples already present in
    /// the same split are dropped with a warning.
    pub fn ingest_triples<R: BufRead>(&mut self, source: R, split: Split) -> Result<IngestStats> {
        let mut stats = IngestStats::default();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with('#') {
                stats.comments_skipped += 1;
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(KgError::Malformed {
                    line: lineno,
                    reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            if fields.iter().any(|f| f.is_empty()) {
                return Err(KgError::Malformed {
                    line: lineno,
                    reason: "empty field".into(),
                });
            }
            if self.add_labeled_at(fields[0], fields[1], fields[2], split, lineno)? {
                stats.added += 1;
            } else {
                log::warn!("line {lineno}: duplicate triple in {split} dropped");
                stats.duplicates_dropped += 1;
            }
        }
        Ok(stats)
    }

    /// Reads Prolog-style `relation(arg1,...,argn).` facts, reifying facts of
    /// arity ≥ 3 through `reifier`.
    pub fn ingest_hyperfacts<R: BufRead>(
        &mut self,
        source: R,
        split: Split,
        reifier: &mut Reifier,
    ) -> Result<IngestStats> {
        let mut stats = IngestStats::default();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('#') || trimmed.starts_with('%') {
                stats.comments_skipped += 1;
                continue;
            }
            let fact = parse_hyperfact(trimmed).map_err(|reason| KgError::Malformed {
                line: lineno,
                reason,
            })?;
            for lt in reifier.reify(&fact)? {
                if self.add_labeled_at(&lt.head, &lt.relation, &lt.tail, split, lineno)? {
                    stats.added += 1;
                } else {
                    stats.duplicates_dropped += 1;
                }
            }
        }
        Ok(stats)
    }

    /// Flags the relations named in `source` (one per line) as attribute
    /// relations. Returns the names that are not in the relation vocabulary.
    pub fn load_attribute_schema<R: BufRead>(&mut self, source: R) -> Result<Vec<String>> {
        let mut unknown = Vec::new();
        for line in source.lines() {
            let line = line?;
            let name = line.trim();
            if name.is_empty() || name.starts_with('#') {
                continue;
            }
            match self.relation(name) {
                Some(r) => {
                    self.attribute_relations.insert(r);
                }
                None => unknown.push(name.to_owned()),
            }
        }
        Ok(unknown)
    }

    pub fn set_attribute(&mut self, r: RelationId, is_attribute: bool) {
        if is_attribute {
            self.attribute_relations.insert(r);
        } else {
            self.attribute_relations.remove(&r);
        }
    }

    /// Copy with entity and relation ids reassigned in lexicographic label
    /// order. Split order is preserved.
    pub fn with_sorted_vocab(&self) -> KnowledgeGraph {
        let (entities, emap) = self.entities.sorted();
        let (relations, rmap) = self.relations.sorted();
        let mut out = KnowledgeGraph {
            entities,
            relations,
            ..KnowledgeGraph::default()
        };
        for split in Split::ALL {
            for t in self.triples(split) {
                let nt = Triple::new(
                    emap[t.head.index()],
                    rmap[t.relation.index()],
                    emap[t.tail.index()],
                );
                out.add(nt, split)
                    .expect("remapped triple keeps split disjointness");
            }
        }
        out.attribute_relations = self
            .attribute_relations
            .iter()
            .map(|r| rmap[r.index()])
            .collect();
        out
    }

    /// Copy without the triples of `relation` (vocabularies unchanged).
    pub fn without_relation(&self, relation: RelationId) -> KnowledgeGraph {
        let mut out = KnowledgeGraph {
            entities: self.entities.clone(),
            relations: self.relations.clone(),
            attribute_relations: self.attribute_relations.clone(),
            ..KnowledgeGraph::default()
        };
        for split in Split::ALL {
            for t in self.triples(split) {
                if t.relation != relation {
                    out.add(*t, split).expect("subset keeps disjointness");
                }
            }
        }
        out
    }

    /// Copy with every triple moved into the train split.
    pub fn merged_into_train(&self) -> KnowledgeGraph {
        let mut out = KnowledgeGraph {
            entities: self.entities.clone(),
            relations: self.relations.clone(),
            attribute_relations: self.attribute_relations.clone(),
            ..KnowledgeGraph::default()
        };
        for t in self.all_triples() {
            out.add(*t, Split::Train).expect("distinct triples");
        }
        out
    }

    /// Builds a graph from explicit vocabularies and split triple lists.
    pub fn from_parts(
        entities: Vocab<EntityId>,
        relations: Vocab<RelationId>,
        splits: [Vec<Triple>; 3],
        attribute_relations: BTreeSet<RelationId>,
    ) -> Result<Self> {
        let mut kg = KnowledgeGraph {
            entities,
            relations,
            attribute_relations,
            ..KnowledgeGraph::default()
        };
        for (split, triples) in Split::ALL.into_iter().zip(splits) {
            for (i, t) in triples.into_iter().enumerate() {
                kg.add_at(t, split, i + 1)?;
            }
        }
        Ok(kg)
    }

    /// Human-readable rendering of a triple.
    pub fn display(&self, t: &Triple) -> String {
        format!(
            "{}({}, {})",
            self.relation_label(t.relation),
            self.entity_label(t.head),
            self.entity_label(t.tail)
        )
    }
}
