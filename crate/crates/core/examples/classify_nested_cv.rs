//! Nested cross-validated kNN on separable blobs and on a permutation
//! null, with the accuracy difference between the two.

use kgbench::classify::{accuracy_difference, nested_cv, stratified_folds, CvConfig, FeatureSpace, LabeledEntities};
use kgbench::embed::Matrix;
use kgbench::fixtures::{gaussian_blobs, permutation_null};
use kgbench::kg::EntityId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (pts, classes) = gaussian_blobs(60, 4, 3, 3.0, 1);
    let blobs = Matrix::from_rows(&pts);
    let labels = LabeledEntities::from_pairs(
        classes.iter().enumerate().map(|(i, &c)| (EntityId(i as u32), c)).collect(),
        vec!["a".into(), "b".into(), "c".into()],
    );
    let outer = stratified_folds(&labels.classes, 5, 0);
    let separable = nested_cv(&FeatureSpace::full_grid(&blobs), &labels, &outer, &CvConfig::default())?;

    let (noise, null_labels) = permutation_null(180, 4, 1);
    let null_outer = stratified_folds(&null_labels.classes, 5, 0);
    let null = nested_cv(&FeatureSpace::full_grid(&noise), &null_labels, &null_outer, &CvConfig::default())?;

    println!("blobs: {:.3}", separable.mean_accuracy);
    println!("null:  {:.3}", null.mean_accuracy);
    let d = accuracy_difference(&separable, &null)?;
    println!("difference {:+.3}", d.mean);
    Ok(())
}
