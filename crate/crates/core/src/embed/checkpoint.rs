//! `KGE1` checkpoint files.
//!
//! ```text
//! "KGE1"
//! u32 kind (0 TransE, 1 DistMult, 2 ComplEx)
//! u32 dim
//! u32 epoch
//! u64 seed
//! u32 num_entities
//! u32 num_relations
//! f64 entity[num_entities × dim]
//! f64 entity_im[...]        ComplEx only
//! f64 relation[num_relations × dim]
//! f64 relation_im[...]      ComplEx only
//! ```
//!
//! Little-endian throughout.

use super::model::{EmbeddingModel, Matrix, ModelKind};
use super::train::CheckpointSink;
use super::{EmbedError, Result};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"KGE1";

pub fn write_checkpoint<W: Write>(w: &mut W, model: &EmbeddingModel, epoch: usize) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&model.kind.code().to_le_bytes())?;
    w.write_all(&(model.dim as u32).to_le_bytes())?;
    w.write_all(&(epoch as u32).to_le_bytes())?;
    w.write_all(&model.seed.to_le_bytes())?;
    w.write_all(&(model.num_entities() as u32).to_le_bytes())?;
    w.write_all(&(model.num_relations() as u32).to_le_bytes())?;
    for table in model.tables() {
        for x in model.table(table).expect("listed table").as_slice() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Returns the model and the epoch recorded in the header.
pub fn read_checkpoint<R: Read>(r: &mut R) -> Result<(EmbeddingModel, usize)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(EmbedError::Format(format!("bad magic {magic:?}")));
    }
    let kind = ModelKind::from_code(read_u32(r)?)
        .ok_or_else(|| EmbedError::Format("unknown model kind".into()))?;
    let dim = read_u32(r)? as usize;
    let epoch = read_u32(r)? as usize;
    let mut seed = [0u8; 8];
    r.read_exact(&mut seed)?;
    let seed = u64::from_le_bytes(seed);
    let ne = read_u32(r)? as usize;
    let nr = read_u32(r)? as usize;
    if dim == 0 {
        return Err(EmbedError::Format("dim is zero".into()));
    }
    let mut model = EmbeddingModel::zeros(kind, dim, ne, nr);
    model.seed = seed;
    for table in model.tables() {
        let m: &mut Matrix = model.table_mut(table).expect("listed table");
        let mut buf = [0u8; 8];
        for x in m.as_mut_slice() {
            r.read_exact(&mut buf)?;
            *x = f64::from_le_bytes(buf);
        }
    }
    Ok((model, epoch))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn save_checkpoint(path: &Path, model: &EmbeddingModel, epoch: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut w, model, epoch)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(EmbeddingModel, usize)> {
    read_checkpoint(&mut BufReader::new(File::open(path)?))
}

/// `<dir>/<kind>_d<dim>_e<epoch>.kge`
pub fn checkpoint_path(dir: &Path, kind: ModelKind, dim: usize, epoch: usize) -> PathBuf {
    dir.join(format!("{kind}_d{dim}_e{epoch:03}.kge"))
}

/// Writes each checkpoint to [`checkpoint_path`].
#[derive(Debug, Clone)]
pub struct DirectorySink {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl DirectorySink {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }
}

impl CheckpointSink for DirectorySink {
    fn save(&mut self, epoch: usize, model: &EmbeddingModel) -> Result<()> {
        let path = checkpoint_path(&self.dir, model.kind, model.dim, epoch);
        save_checkpoint(&path, model, epoch)?;
        self.written.push(path);
        Ok(())
    }
}
