use nalgebra::Vector2;

use super::{MapElement, MapError};
use crate::scalar::Real;

/// Shortest element accepted by [`resample`], in meters.
pub const MIN_ARC_LENGTH: f64 = 1e-9;

/// Point at arc length `s` along the polyline `points` (closing edge included
/// when `closed`), given cumulative vertex lengths `cum`.
fn point_at<T: Real>(points: &[Vector2<T>], cum: &[T], closed: bool, s: T) -> Vector2<T> {
    let n_edges = if closed {
        points.len()
    } else {
        points.len() - 1
    };
    // last edge whose start is at or before s
    let mut i = cum[..n_edges].partition_point(|&c| c <= s).max(1) - 1;
    while i + 1 < n_edges && cum[i + 1] <= s {
        i += 1;
    }
    let a = points[i];
    let b = points[(i + 1) % points.len()];
    let len = cum[i + 1] - cum[i];
    if len <= T::zero() {
        return a;
    }
    let t = ((s - cum[i]) / len).clamp(T::zero(), T::one());
    a + (b - a) * t
}

/// Cumulative arc length at each vertex; for closed elements one extra entry
/// holds the perimeter.
pub fn cumulative_lengths<T: Real>(points: &[Vector2<T>], closed: bool) -> Vec<T> {
    let mut cum = Vec::with_capacity(points.len() + 1);
    let mut acc = T::zero();
    cum.push(acc);
    for w in points.windows(2) {
        acc += (w[1] - w[0]).norm();
        cum.push(acc);
    }
    if closed {
        acc += (points[0] - points[points.len() - 1]).norm();
        cum.push(acc);
    }
    cum
}

/// `n_p` points equally spaced by arc length. Open elements keep both end
/// points; closed elements start at the first vertex and spread over the
/// perimeter without repeating it.
pub fn resample<T: Real>(element: &MapElement<T>, n_p: usize) -> Result<MapElement<T>, MapError> {
    if n_p < 2 {
        return Err(MapError::InvalidCount(n_p));
    }
    element.validate()?;
    let pts = &element.points;
    let cum = cumulative_lengths(pts, element.is_closed);
    let total = cum[cum.len() - 1];
    if !(total >= T::lit(MIN_ARC_LENGTH)) {
        return Err(MapError::Degenerate {
            length: total.as_f64(),
        });
    }
    let denom = T::lit(if element.is_closed { n_p } else { n_p - 1 } as f64);
    let mut points: Vec<Vector2<T>> = (0..n_p)
        .map(|k| {
            let s = total * T::lit(k as f64) / denom;
            point_at(pts, &cum, element.is_closed, s)
        })
        .collect();
    points[0] = pts[0];
    if !element.is_closed {
        points[n_p - 1] = pts[pts.len() - 1];
    }
    Ok(MapElement {
        points,
        frame: element.frame,
        class: element.class,
        is_closed: element.is_closed,
    })
}
