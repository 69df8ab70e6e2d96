//! Binary directory layout:
//!
//! ```text
//! entities.tsv    id<TAB>label, one per line, ids 0..n in order
//! relations.tsv   same for relations
//! train.idx       "KGB1", u32 count, count × (u32 head, u32 relation, u32 tail)
//! valid.idx
//! test.idx
//! attributes.txt  attribute relation names (only when non-empty)
//! ```
//!
//! All integers little-endian.

use super::{EntityId, KgError, KnowledgeGraph, RelationId, Result, Split, Triple, Vocab};
use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const KG_MAGIC: &[u8; 4] = b"KGB1";

impl KnowledgeGraph {
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_vocab(&dir.join("entities.tsv"), self.entities().labels())?;
        write_vocab(&dir.join("relations.tsv"), self.relations().labels())?;
        for split in Split::ALL {
            let mut w = BufWriter::new(File::create(dir.join(format!("{split}.idx")))?);
            write_idx(&mut w, self.triples(split))?;
            w.flush()?;
        }
        let attr_path = dir.join("attributes.txt");
        if self.attribute_relations().is_empty() {
            if attr_path.exists() {
                fs::remove_file(attr_path)?;
            }
        } else {
            let mut w = BufWriter::new(File::create(attr_path)?);
            for r in self.attribute_relations() {
                writeln!(w, "{}", self.relation_label(*r))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let entities: Vocab<EntityId> = read_vocab(&dir.join("entities.tsv"))?;
        let relations: Vocab<RelationId> = read_vocab(&dir.join("relations.tsv"))?;
        let mut splits: [Vec<Triple>; 3] = Default::default();
        for split in Split::ALL {
            let mut r = BufReader::new(File::open(dir.join(format!("{split}.idx")))?);
            splits[split as usize] = read_idx(&mut r)?;
        }
        let mut attrs = BTreeSet::new();
        let attr_path = dir.join("attributes.txt");
        if attr_path.exists() {
            for line in BufReader::new(File::open(attr_path)?).lines() {
                let line = line?;
                let name = line.trim();
                if name.is_empty() {
                    continue;
                }
                let r = relations.get(name).ok_or_else(|| {
                    KgError::Format(format!("attribute relation `{name}` not in vocabulary"))
                })?;
                attrs.insert(r);
            }
        }
        KnowledgeGraph::from_parts(entities, relations, splits, attrs)
    }

    /// Writes one split as label TSV, the same format `ingest_triples` reads.
    pub fn write_split_tsv<W: Write>(&self, split: Split, mut out: W) -> Result<()> {
        for t in self.triples(split) {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.entity_label(t.head),
                self.relation_label(t.relation),
                self.entity_label(t.tail)
            )?;
        }
        Ok(())
    }
}

fn write_vocab(path: &Path, labels: &[String]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (i, l) in labels.iter().enumerate() {
        writeln!(w, "{i}\t{l}")?;
    }
    w.flush()?;
    Ok(())
}

fn read_vocab<I: super::DenseId>(path: &Path) -> Result<Vocab<I>> {
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| {
            KgError::Format(format!("{}: line {} lacks a tab", path.display(), i + 1))
        })?;
        let id: usize = id
            .parse()
            .map_err(|_| KgError::Format(format!("{}: bad id `{id}`", path.display())))?;
        if id != labels.len() {
            return Err(KgError::Format(format!(
                "{}: ids not contiguous at {id}",
                path.display()
            )));
        }
        labels.push(label.to_owned());
    }
    Vocab::from_labels(&labels)
        .ok_or_else(|| KgError::Format(format!("{}: duplicate label", path.display())))
}

pub(crate) fn write_idx<W: Write>(w: &mut W, triples: &[Triple]) -> std::io::Result<()> {
    w.write_all(KG_MAGIC)?;
    w.write_all(&(triples.len() as u32).to_le_bytes())?;
    for t in triples {
        w.write_all(&t.head.0.to_le_bytes())?;
        w.write_all(&t.relation.0.to_le_bytes())?;
        w.write_all(&t.tail.0.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_idx<R: Read>(r: &mut R) -> Result<Vec<Triple>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != KG_MAGIC {
        return Err(KgError::Format(format!("bad magic {magic:?}")));
    }
    let n = read_u32(r)? as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let h = read_u32(r)?;
        let rel = read_u32(r)?;
        let t = read_u32(r)?;
        out.push(Triple::new(EntityId(h), RelationId(rel), EntityId(t)));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(KgError::Format("trailing bytes after triples".into()));
    }
    Ok(out)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
