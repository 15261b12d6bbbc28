use super::{chamfer, EvalError, Prediction};
use crate::map::MapElement;
use crate::scalar::Real;

/// Prediction indices in processing order: descending score, ties by index.
pub fn score_order<T: Real>(scores: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// `distances[p][g]`: Chamfer distance between prediction `p` and ground truth `g`.
pub fn distance_matrix<T: Real>(
    preds: &[Prediction<T>],
    gts: &[MapElement<T>],
) -> Result<Vec<Vec<T>>, EvalError> {
    preds
        .iter()
        .map(|p| {
            gts.iter()
                .map(|g| chamfer(&p.element.points, &g.points))
                .collect()
        })
        .collect()
}

/// Greedy assignment on a precomputed distance matrix. Returns TP flags in
/// input order.
pub fn match_with_distances<T: Real>(
    scores: &[T],
    distances: &[Vec<T>],
    threshold: T,
) -> Vec<bool> {
    let n_gt = distances.first().map_or(0, Vec::len);
    let mut taken = vec![false; n_gt];
    let mut tp = vec![false; scores.len()];
    for p in score_order(scores) {
        let best = distances[p]
            .iter()
            .enumerate()
            .filter(|(g, _)| !taken[*g])
            .fold(None, |best: Option<(usize, T)>, (g, &d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((g, d)),
            });
        if let Some((g, d)) = best {
            if d <= threshold {
                taken[g] = true;
                tp[p] = true;
            }
        }
    }
    tp
}

/// Matches same-class predictions to ground truth: in descending score order,
/// each prediction takes the closest unmatched ground truth if it is within
/// `threshold` (true positive), otherwise it is a false positive.
pub fn match_class<T: Real>(
    preds: &[Prediction<T>],
    gts: &[MapElement<T>],
    threshold: T,
) -> Result<Vec<bool>, EvalError> {
    let scores: Vec<T> = preds.iter().map(|p| p.score).collect();
    let distances = distance_matrix(preds, gts)?;
    Ok(match_with_distances(&scores, &distances, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{Frame, MapClass};
    use nalgebra::Vector2;

    fn el(y: f64) -> MapElement<f64> {
        MapElement::open(
            vec![Vector2::new(0.0, y), Vector2::new(1.0, y)],
            Frame::Ego,
            MapClass::Divider,
        )
        .unwrap()
    }

    fn pred(y: f64, score: f64) -> Prediction<f64> {
        Prediction::new(el(y), score).unwrap()
    }

    #[test]
    fn exact_match_is_tp() {
        for t in [0.5, 1.0, 1.5] {
            assert_eq!(
                match_class(&[pred(0.0, 0.5)], &[el(0.0)], t).unwrap(),
                vec![true]
            );
        }
    }

    #[test]
    fn no_ground_truth_all_fp() {
        assert_eq!(
            match_class(&[pred(0.0, 0.5), pred(1.0, 0.7)], &[], 1.5).unwrap(),
            vec![false, false]
        );
    }

    #[test]
    fn higher_score_claims_first() {
        // chamfer 0.4 for the 0.9 prediction, 0.2 for the 0.8 one
        let flags = match_class(&[pred(0.4, 0.9), pred(0.2, 0.8)], &[el(0.0)], 0.5).unwrap();
        assert_eq!(flags, vec![true, false]);
    }

    #[test]
    fn order_ties_by_index() {
        assert_eq!(score_order(&[0.5, 0.9, 0.5, 0.1]), vec![1, 0, 2, 3]);
    }
}
