use std::collections::BTreeMap;
use std::path::Path;

use super::{find_version_dir, PackageError, SampleRecord};
use crate::eval::{EvalSample, Prediction};
use crate::map::{load_map, MapLayer};

/// Ground-truth map labels of every sample, in sample table order.
pub fn load_ground_truth(root: &Path) -> Result<Vec<(String, MapLayer<f64>)>, PackageError> {
    let dir =
        find_version_dir(root)?.ok_or_else(|| PackageError::NotADataset(root.to_path_buf()))?;
    let path = dir.join("sample.json");
    let text =
        std::fs::read_to_string(&path).map_err(|source| PackageError::Io { path, source })?;
    let samples: Vec<SampleRecord> = serde_json::from_str(&text)?;
    samples
        .into_iter()
        .map(|s| {
            let path = root.join("maps/labels").join(format!("{}.json", s.token));
            if !path.is_file() {
                return Err(PackageError::MissingLabels(s.token));
            }
            Ok((s.token, load_map(&path)?.to_layer()?))
        })
        .collect()
}

/// Pairs predictions with the dataset's labels. Samples without predictions
/// take part with an empty list; predictions for unknown samples are an error.
pub fn eval_samples(
    root: &Path,
    mut predictions: BTreeMap<String, Vec<Prediction<f64>>>,
) -> Result<Vec<EvalSample<f64>>, PackageError> {
    let gt = load_ground_truth(root)?;
    let out: Vec<EvalSample<f64>> = gt
        .into_iter()
        .map(|(sample_id, ground_truth)| EvalSample {
            predictions: predictions.remove(&sample_id).unwrap_or_default(),
            sample_id,
            ground_truth,
        })
        .collect();
    if let Some(unknown) = predictions.into_keys().next() {
        return Err(PackageError::UnknownSample(unknown));
    }
    Ok(out)
}

/// Ground truth restated as predictions with score 1.
pub fn ground_truth_as_predictions(
    samples: &[(String, MapLayer<f64>)],
) -> BTreeMap<String, Vec<Prediction<f64>>> {
    samples
        .iter()
        .map(|(id, layer)| {
            let preds = layer
                .elements
                .iter()
                .map(|e| Prediction {
                    element: e.clone(),
                    score: 1.0,
                })
                .collect();
            (id.clone(), preds)
        })
        .collect()
}
