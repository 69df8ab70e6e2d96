use super::{ClassifyError, Result};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Triple};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write};

/// Labeled entities in file order. Class ids index `class_names`, which is
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledEntities {
    pub entities: Vec<EntityId>,
    pub classes: Vec<u32>,
    pub class_names: Vec<String>,
}

impl LabeledEntities {
    pub fn from_pairs(pairs: Vec<(EntityId, u32)>, class_names: Vec<String>) -> Self {
        let (entities, classes) = pairs.into_iter().unzip();
        Self {
            entities,
            classes,
            class_names,
        }
    }

    /// Interns class names in sorted order.
    pub fn from_named(pairs: Vec<(EntityId, String)>) -> Result<Self> {
        let names: Vec<String> = pairs
            .iter()
            .map(|p| p.1.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(pairs.len());
        for (e, c) in pairs {
            if !seen.insert(e) {
                return Err(ClassifyError::Labels(format!(
                    "entity {e} is labeled twice"
                )));
            }
            out.push((e, names.binary_search(&c).unwrap() as u32));
        }
        Ok(Self::from_pairs(out, names))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn pairs(&self) -> Vec<(EntityId, u32)> {
        self.entities
            .iter()
            .copied()
            .zip(self.classes.iter().copied())
            .collect()
    }

    pub fn class_of(&self, e: EntityId) -> Option<u32> {
        self.entities
            .iter()
            .position(|&x| x == e)
            .map(|i| self.classes[i])
    }
}

/// Most frequent class; ties go to the smallest id.
pub fn majority_class(classes: &[u32]) -> Option<u32> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in classes {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c)
}

fn tsv_pairs<R: BufRead>(source: R, what: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let t = line.trim_end_matches(['\r', '\n']);
        if t.trim().is_empty() || t.starts_with('#') {
            continue;
        }
        let mut f = t.split('\t');
        match (f.next(), f.next(), f.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                out.push((i + 1, a.to_owned(), b.to_owned()))
            }
            _ => {
                return Err(ClassifyError::Labels(format!(
                    "{what} line {}: expected two tab-separated fields",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// `entity<TAB>class` lines.
pub fn read_labels<R: BufRead>(source: R, kg: &KnowledgeGraph) -> Result<LabeledEntities> {
    let mut pairs = Vec::new();
    for (line, e, c) in tsv_pairs(source, "labels")? {
        let id = kg.entity(&e).ok_or_else(|| {
            ClassifyError::Labels(format!("labels line {line}: unknown entity `{e}`"))
        })?;
        pairs.push((id, c));
    }
    LabeledEntities::from_named(pairs)
}

pub fn write_labels<W: Write>(
    mut w: W,
    kg: &KnowledgeGraph,
    labels: &LabeledEntities,
) -> std::io::Result<()> {
    for (e, c) in labels.entities.iter().zip(&labels.classes) {
        writeln!(
            w,
            "{}\t{}",
            kg.entity_label(*e),
            labels.class_names[*c as usize]
        )?;
    }
    Ok(())
}

/// `entity<TAB>fold` lines; returns one fold id per labeled entity. Fold
/// names are numbered in sorted order.
pub fn read_folds<R: BufRead>(
    source: R,
    kg: &KnowledgeGraph,
    labels: &LabeledEntities,
) -> Result<Vec<usize>> {
    let mut by_entity: BTreeMap<EntityId, String> = BTreeMap::new();
    for (line, e, f) in tsv_pairs(source, "folds")? {
        let id = kg.entity(&e).ok_or_else(|| {
            ClassifyError::Labels(format!("folds line {line}: unknown entity `{e}`"))
        })?;
        by_entity.insert(id, f);
    }
    let names: Vec<&String> = by_entity
        .values()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    labels
        .entities
        .iter()
        .map(|e| {
            let f = by_entity.get(e).ok_or_else(|| {
                ClassifyError::Labels(format!(
                    "no fold for labeled entity `{}`",
                    kg.entity_label(*e)
                ))
            })?;
            Ok(names.binary_search(&f).unwrap())
        })
        .collect()
}

/// Deterministic stratified assignment of `k` folds: within each class the
/// members are shuffled, then dealt round-robin continuing across classes.
pub fn stratified_folds(classes: &[u32], k: usize, seed: u64) -> Vec<usize> {
    assert!(k > 0, "fold count must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in classes.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut folds = vec![0; classes.len()];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next % k;
            next += 1;
        }
    }
    folds
}

/// Splits a label relation out of the graph: returns the labels it carries
/// (subject → object label) and the graph without it.
pub fn labels_from_relation(
    kg: &KnowledgeGraph,
    relation: RelationId,
) -> Result<(LabeledEntities, KnowledgeGraph)> {
    let pairs: Vec<(EntityId, String)> = kg
        .all_triples()
        .filter(|t| t.relation == relation)
        .map(|t| (t.head, kg.entity_label(t.tail).to_owned()))
        .collect();
    if pairs.is_empty() {
        return Err(ClassifyError::Labels(format!(
            "relation `{}` has no triples",
            kg.relation_label(relation)
        )));
    }
    let labels = LabeledEntities::from_named(pairs)?;
    let stripped = kg.without_relation(relation);
    assert_label_free(&stripped, kg, relation)?;
    Ok((labels, stripped))
}

/// Fails if `view` still contains any triple of `relation` from `source`.
pub fn assert_label_free(
    view: &KnowledgeGraph,
    source: &KnowledgeGraph,
    relation: RelationId,
) -> Result<()> {
    let label = source.relation_label(relation);
    let Some(r) = view.relation(label) else {
        return Ok(());
    };
    let leaked = source
        .all_triples()
        .filter(|t| t.relation == relation)
        .find(|t| {
            match (
                view.entity(source.entity_label(t.head)),
                view.entity(source.entity_label(t.tail)),
            ) {
                (Some(h), Some(tl)) => view.is_known(&Triple::new(h, r, tl)),
                _ => false,
            }
        });
    match leaked {
        Some(t) => Err(ClassifyError::LabelLeak(source.display(t))),
        None => Ok(()),
    }
}
