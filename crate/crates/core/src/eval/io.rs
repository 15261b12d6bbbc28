//! Predictions file: one JSON object per line,
//! `{sample_id, class, score, points: [[x, y], ...]}`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::{EvalError, Prediction};
use crate::map::{Frame, MapClass, MapElement};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub class: MapClass,
    pub score: f64,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_closed: bool,
}

impl PredictionRecord {
    pub fn to_prediction(&self) -> Result<Prediction<f64>, EvalError> {
        let element = MapElement::new(
            self.points
                .iter()
                .map(|p| Vector2::new(p[0], p[1]))
                .collect(),
            Frame::Ego,
            self.class,
            self.is_closed,
        )?;
        Prediction::new(element, self.score)
    }
}

/// Predictions grouped by sample id, file order kept within a sample.
pub fn parse_predictions(text: &str) -> Result<BTreeMap<String, Vec<Prediction<f64>>>, EvalError> {
    let mut out: BTreeMap<String, Vec<Prediction<f64>>> = BTreeMap::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(line).map_err(|e| EvalError::Parse {
                line: line_no + 1,
                message: e.to_string(),
            })?;
        out.entry(record.sample_id.clone())
            .or_default()
            .push(record.to_prediction()?);
    }
    Ok(out)
}

pub fn load_predictions(
    path: impl AsRef<Path>,
) -> Result<BTreeMap<String, Vec<Prediction<f64>>>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_predictions(&text)
}

pub fn predictions_to_jsonl<'a>(
    items: impl IntoIterator<Item = (&'a str, &'a Prediction<f64>)>,
) -> String {
    let mut out = String::new();
    for (sample_id, p) in items {
        let record = PredictionRecord {
            sample_id: sample_id.to_string(),
            class: p.element.class,
            score: p.score,
            points: p.element.points.iter().map(|v| [v.x, v.y]).collect(),
            is_closed: p.element.is_closed,
        };
        out.push_str(&serde_json::to_string(&record).expect("serializable"));
        out.push('\n');
    }
    out
}
