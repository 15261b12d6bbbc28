//! Vector map evaluation: Chamfer distance, greedy per-class matching and
//! average precision pooled over samples, averaged over thresholds and the
//! four map classes.

mod ap;
mod chamfer;
pub mod io;
mod matching;
mod report;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ap::{average_precision, ApMode, ScoredFlag};
pub use chamfer::chamfer;
pub use io::{load_predictions, parse_predictions, predictions_to_jsonl, PredictionRecord};
pub use matching::{distance_matrix, match_class, match_with_distances, score_order};
pub use report::{ClassResult, EvalReport};

use crate::map::{MapClass, MapElement, MapError, MapLayer};
use crate::scalar::Real;

/// Chamfer thresholds in meters.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("chamfer distance of an empty point set")]
    EmptyPointSet,
    #[error("score {0} outside [0, 1]")]
    InvalidScore(f64),
    #[error("inconsistent point count: expected {expected}, sample {sample_id:?} has {found}")]
    InconsistentPoints {
        sample_id: String,
        expected: usize,
        found: usize,
    },
    #[error("thresholds must be positive and strictly increasing")]
    InvalidThresholds,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("predictions line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T: Real> {
    pub element: MapElement<T>,
    pub score: T,
}

impl<T: Real> Prediction<T> {
    pub fn new(element: MapElement<T>, score: T) -> Result<Self, EvalError> {
        if !(score >= T::zero() && score <= T::one()) {
            return Err(EvalError::InvalidScore(score.as_f64()));
        }
        Ok(Self { element, score })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSample<T: Real> {
    pub sample_id: String,
    pub predictions: Vec<Prediction<T>>,
    pub ground_truth: MapLayer<T>,
}

/// How detections from different samples are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// One ranked list over all samples.
    #[default]
    Global,
    /// AP per sample, then the mean over samples where it is defined.
    PerSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub thresholds: Vec<f64>,
    pub mode: ApMode,
    pub pooling: Pooling,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            mode: ApMode::Interp101,
            pooling: Pooling::Global,
        }
    }
}

/// All elements of all samples must share one point count.
fn check_point_count<T: Real>(samples: &[EvalSample<T>]) -> Result<(), EvalError> {
    let mut expected = None;
    for s in samples {
        let counts = s
            .predictions
            .iter()
            .map(|p| p.element.points.len())
            .chain(s.ground_truth.elements.iter().map(|e| e.points.len()));
        for found in counts {
            match expected {
                None => expected = Some(found),
                Some(n) if n != found => {
                    return Err(EvalError::InconsistentPoints {
                        sample_id: s.sample_id.clone(),
                        expected: n,
                        found,
                    })
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Per-sample, per-class matching inputs.
struct ClassSample<T: Real> {
    scores: Vec<T>,
    distances: Vec<Vec<T>>,
    n_gt: usize,
}

/// Evaluates predictions against ground truth at every threshold.
pub fn evaluate<T: Real>(
    samples: &[EvalSample<T>],
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    if config.thresholds.is_empty()
        || config.thresholds[0] <= 0.0
        || config.thresholds.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(EvalError::InvalidThresholds);
    }
    check_point_count(samples)?;

    // [class][sample]
    let prepared: Vec<Vec<ClassSample<T>>> = MapClass::ALL
        .iter()
        .map(|&class| {
            samples
                .par_iter()
                .map(|s| {
                    let preds: Vec<Prediction<T>> = s
                        .predictions
                        .iter()
                        .filter(|p| p.element.class == class)
                        .cloned()
                        .collect();
                    let gts: Vec<MapElement<T>> = s.ground_truth.of_class(class).cloned().collect();
                    Ok(ClassSample {
                        scores: preds.iter().map(|p| p.score).collect(),
                        distances: distance_matrix(&preds, &gts)?,
                        n_gt: gts.len(),
                    })
                })
                .collect::<Result<Vec<_>, EvalError>>()
        })
        .collect::<Result<_, _>>()?;

    let classes = MapClass::ALL
        .iter()
        .zip(&prepared)
        .map(|(&class, per_sample)| {
            let ap_by_threshold: Vec<Option<f64>> = config
                .thresholds
                .iter()
                .map(|&threshold| {
                    let t = T::lit(threshold);
                    let flagged: Vec<(Vec<ScoredFlag>, usize)> = per_sample
                        .iter()
                        .map(|cs| {
                            let tp = match_with_distances(&cs.scores, &cs.distances, t);
                            let flags = cs
                                .scores
                                .iter()
                                .zip(tp)
                                .map(|(s, tp)| ScoredFlag {
                                    score: s.as_f64(),
                                    tp,
                                })
                                .collect();
                            (flags, cs.n_gt)
                        })
                        .collect();
                    match config.pooling {
                        Pooling::Global => {
                            let n_gt = flagged.iter().map(|f| f.1).sum();
                            let all: Vec<ScoredFlag> =
                                flagged.into_iter().flat_map(|f| f.0).collect();
                            average_precision(&all, n_gt, config.mode)
                        }
                        Pooling::PerSample => mean_defined(
                            flagged
                                .iter()
                                .map(|(flags, n_gt)| average_precision(flags, *n_gt, config.mode)),
                        ),
                    }
                })
                .collect();
            ClassResult {
                class,
                ap: mean_defined(ap_by_threshold.iter().copied()),
                ap_by_threshold,
            }
        })
        .collect::<Vec<_>>();

    let map = 100.0 * mean_defined(classes.iter().map(|c| c.ap)).unwrap_or(0.0);
    Ok(EvalReport {
        thresholds: config.thresholds.clone(),
        mode: config.mode,
        pooling: config.pooling,
        num_samples: samples.len(),
        classes,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Frame;
    use nalgebra::Vector2;

    fn el(class: MapClass, y: f64) -> MapElement<f64> {
        MapElement::open(
            (0..4).map(|i| Vector2::new(i as f64, y)).collect(),
            Frame::Ego,
            class,
        )
        .unwrap()
    }

    fn gt_layer() -> MapLayer<f64> {
        MapLayer::new(
            Frame::Ego,
            MapClass::ALL
                .iter()
                .enumerate()
                .map(|(i, &c)| el(c, i as f64 * 5.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn perfect_predictions_score_100() {
        let gt = gt_layer();
        let sample = EvalSample {
            sample_id: "s".into(),
            predictions: gt
                .elements
                .iter()
                .map(|e| Prediction::new(e.clone(), 1.0).unwrap())
                .collect(),
            ground_truth: gt,
        };
        let r = evaluate(&[sample], &EvalConfig::default()).unwrap();
        assert_eq!(r.map, 100.0);
        assert!(r.classes.iter().all(|c| c.ap == Some(1.0)));
    }

    #[test]
    fn no_predictions_score_zero() {
        let sample = EvalSample {
            sample_id: "s".into(),
            predictions: vec![],
            ground_truth: gt_layer(),
        };
        assert_eq!(
            evaluate(&[sample], &EvalConfig::default()).unwrap().map,
            0.0
        );
    }

    #[test]
    fn inconsistent_point_count() {
        let short = MapElement::open(
            vec![Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0)],
            Frame::Ego,
            MapClass::Divider,
        )
        .unwrap();
        let sample = EvalSample {
            sample_id: "s".into(),
            predictions: vec![Prediction::new(short, 0.5).unwrap()],
            ground_truth: gt_layer(),
        };
        assert!(matches!(
            evaluate(&[sample], &EvalConfig::default()),
            Err(EvalError::InconsistentPoints { .. })
        ));
    }

    #[test]
    fn bad_thresholds_and_scores() {
        let cfg = EvalConfig {
            thresholds: vec![1.0, 0.5],
            ..EvalConfig::default()
        };
        assert!(matches!(
            evaluate::<f64>(&[], &cfg),
            Err(EvalError::InvalidThresholds)
        ));
        assert!(Prediction::new(el(MapClass::Divider, 0.0), 1.5).is_err());
    }

    #[test]
    fn table_layout() {
        let sample = EvalSample {
            sample_id: "s".into(),
            predictions: vec![],
            ground_truth: gt_layer(),
        };
        let table = evaluate(&[sample], &EvalConfig::default())
            .unwrap()
            .to_table();
        assert!(table.lines().next().unwrap().contains("Div."));
        assert_eq!(table.lines().count(), 5);
    }
}
