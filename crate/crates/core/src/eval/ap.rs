use serde::{Deserialize, Serialize};

/// How precision/recall pairs are reduced to one AP value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApMode {
    /// Mean interpolated precision at recall 0, 0.01, ..., 1.
    #[default]
    Interp101,
    /// Area under the monotone precision envelope.
    AllPoint,
}

/// One pooled detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredFlag {
    pub score: f64,
    pub tp: bool,
}

/// Average precision of `detections` against `n_gt` ground-truth elements.
///
/// Detections are ranked by descending score; equal scores keep their input
/// order. Returns `None` when there is neither ground truth nor any
/// detection, `Some(0.0)` when there are detections but no ground truth.
pub fn average_precision(detections: &[ScoredFlag], n_gt: usize, mode: ApMode) -> Option<f64> {
    if n_gt == 0 {
        return (!detections.is_empty()).then_some(0.0);
    }
    let mut ranked: Vec<&ScoredFlag> = detections.iter().collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut tp = 0usize;
    let mut precision = Vec::with_capacity(ranked.len());
    let mut recall = Vec::with_capacity(ranked.len());
    for (k, d) in ranked.iter().enumerate() {
        if d.tp {
            tp += 1;
        }
        precision.push(tp as f64 / (k + 1) as f64);
        recall.push(tp as f64 / n_gt as f64);
    }
    Some(match mode {
        ApMode::Interp101 => {
            // envelope[k] = max precision at ranks >= k; recall is non-decreasing
            let mut envelope = precision.clone();
            for k in (0..envelope.len().saturating_sub(1)).rev() {
                envelope[k] = envelope[k].max(envelope[k + 1]);
            }
            let mut sum = 0.0;
            let mut k = 0;
            for r in 0..=100 {
                let level = r as f64 / 100.0;
                while k < recall.len() && recall[k] < level {
                    k += 1;
                }
                if k < recall.len() {
                    sum += envelope[k];
                }
            }
            sum / 101.0
        }
        ApMode::AllPoint => {
            let mut mrec = vec![0.0];
            mrec.extend(&recall);
            mrec.push(1.0);
            let mut mpre = vec![0.0];
            mpre.extend(&precision);
            mpre.push(0.0);
            for i in (0..mpre.len() - 1).rev() {
                mpre[i] = mpre[i].max(mpre[i + 1]);
            }
            (1..mrec.len())
                .filter(|&i| mrec[i] != mrec[i - 1])
                .map(|i| (mrec[i] - mrec[i - 1]) * mpre[i])
                .sum()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(score: f64, tp: bool) -> ScoredFlag {
        ScoredFlag { score, tp }
    }

    #[test]
    fn single_tp() {
        assert_eq!(
            average_precision(&[f(0.9, true)], 1, ApMode::Interp101),
            Some(1.0)
        );
        assert_eq!(
            average_precision(&[f(0.9, true)], 1, ApMode::AllPoint),
            Some(1.0)
        );
    }

    #[test]
    fn no_predictions() {
        assert_eq!(average_precision(&[], 1, ApMode::Interp101), Some(0.0));
    }

    #[test]
    fn undefined_and_zero_without_gt() {
        assert_eq!(average_precision(&[], 0, ApMode::Interp101), None);
        assert_eq!(
            average_precision(&[f(0.3, false)], 0, ApMode::Interp101),
            Some(0.0)
        );
    }

    #[test]
    fn interpolation_definition() {
        // precision 1.0 up to recall 0.5, 2/3 at recall 1.0
        let d = [f(0.9, true), f(0.8, false), f(0.7, true)];
        let ap = average_precision(&d, 2, ApMode::Interp101).unwrap();
        let expected = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
        assert!((ap - expected).abs() < 1e-15);
        assert!((ap - 0.835).abs() < 1e-3);
        let all = average_precision(&d, 2, ApMode::AllPoint).unwrap();
        assert!((all - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn input_order_irrelevant_for_distinct_scores() {
        let a = [f(0.2, false), f(0.9, true), f(0.5, true)];
        let b = [f(0.9, true), f(0.5, true), f(0.2, false)];
        assert_eq!(
            average_precision(&a, 3, ApMode::Interp101),
            average_precision(&b, 3, ApMode::Interp101)
        );
    }
}
