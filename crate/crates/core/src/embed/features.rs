use super::model::{EmbeddingModel, Matrix};
use super::{EmbedError, Result};
use crate::kg::{EntityId, KnowledgeGraph};
use std::io::Write;

/// One row per entity. ComplEx rows are the real part followed by the
/// imaginary part, so their width is `2·dim`.
pub fn export_features(model: &EmbeddingModel, entities: &[EntityId]) -> Result<Matrix> {
    let width = feature_width(model);
    let mut out = Matrix::zeros(entities.len(), width);
    for (i, &e) in entities.iter().enumerate() {
        if e.index() >= model.num_entities() {
            return Err(EmbedError::OutOfRange(format!("entity {e}")));
        }
        let row = out.row_mut(i);
        row[..model.dim].copy_from_slice(model.entity.row(e.index()));
        if let Some(im) = &model.entity_im {
            row[model.dim..].copy_from_slice(im.row(e.index()));
        }
    }
    Ok(out)
}

pub fn feature_width(model: &EmbeddingModel) -> usize {
    if model.kind.is_complex() {
        2 * model.dim
    } else {
        model.dim
    }
}

/// CSV with header `entity,f0,f1,...` and entity labels in the first column.
pub fn write_features_csv<W: Write>(
    mut out: W,
    kg: &KnowledgeGraph,
    model: &EmbeddingModel,
    entities: &[EntityId],
) -> Result<()> {
    let features = export_features(model, entities)?;
    write!(out, "entity")?;
    for i in 0..features.cols() {
        write!(out, ",f{i}")?;
    }
    writeln!(out)?;
    for (row, &e) in features.iter_rows().zip(entities) {
        write!(out, "{}", csv_field(kg.entity_label(e)))?;
        for x in row {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
