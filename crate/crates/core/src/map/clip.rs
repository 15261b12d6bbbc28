use nalgebra::Vector2;

use super::{BevRange, Frame, MapElement, MapError, MapLayer};
use crate::scalar::Real;

/// Parametric interval `[t0, t1]` of segment `a -> b` inside `range`
/// (Liang-Barsky), or `None` when the segment misses it.
fn clip_segment<T: Real>(a: &Vector2<T>, b: &Vector2<T>, range: &BevRange<T>) -> Option<(T, T)> {
    let d = b - a;
    let mut t0 = T::zero();
    let mut t1 = T::one();
    let checks = [
        (-d.x, a.x - range.x_min),
        (d.x, range.x_max - a.x),
        (-d.y, a.y - range.y_min),
        (d.y, range.y_max - a.y),
    ];
    for (p, q) in checks {
        if p == T::zero() {
            if q < T::zero() {
                return None;
            }
            continue;
        }
        let r = q / p;
        if p < T::zero() {
            if r > t1 {
                return None;
            }
            if r > t0 {
                t0 = r;
            }
        } else {
            if r < t0 {
                return None;
            }
            if r < t1 {
                t1 = r;
            }
        }
    }
    Some((t0, t1))
}

fn lerp<T: Real>(a: &Vector2<T>, b: &Vector2<T>, t: T) -> Vector2<T> {
    if t == T::zero() {
        *a
    } else if t == T::one() {
        *b
    } else {
        a + (b - a) * t
    }
}

/// Splits an open polyline into the chains that lie inside `range`.
fn clip_open<T: Real>(points: &[Vector2<T>], range: &BevRange<T>) -> Vec<Vec<Vector2<T>>> {
    let mut chains = Vec::new();
    let mut current: Vec<Vector2<T>> = Vec::new();
    for w in points.windows(2) {
        let Some((t0, t1)) = clip_segment(&w[0], &w[1], range) else {
            if !current.is_empty() {
                chains.push(std::mem::take(&mut current));
            }
            continue;
        };
        let entry = range.clamp(lerp(&w[0], &w[1], t0));
        let exit = range.clamp(lerp(&w[0], &w[1], t1));
        if t0 > T::zero() && !current.is_empty() {
            chains.push(std::mem::take(&mut current));
        }
        if current.is_empty() {
            current.push(entry);
        }
        if exit != current[current.len() - 1] {
            current.push(exit);
        }
        if t1 < T::one() {
            chains.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        chains.push(current);
    }
    chains.retain(|c| c.len() >= 2);
    chains
}

/// Sutherland-Hodgman clip of a closed polygon against `range`.
fn clip_closed<T: Real>(points: &[Vector2<T>], range: &BevRange<T>) -> Vec<Vector2<T>> {
    type Edge<T> = (
        fn(&Vector2<T>, &BevRange<T>) -> bool,
        fn(&Vector2<T>, &Vector2<T>, &BevRange<T>) -> Vector2<T>,
    );
    fn inside_x_min<T: Real>(p: &Vector2<T>, r: &BevRange<T>) -> bool {
        p.x >= r.x_min
    }
    fn inside_x_max<T: Real>(p: &Vector2<T>, r: &BevRange<T>) -> bool {
        p.x <= r.x_max
    }
    fn inside_y_min<T: Real>(p: &Vector2<T>, r: &BevRange<T>) -> bool {
        p.y >= r.y_min
    }
    fn inside_y_max<T: Real>(p: &Vector2<T>, r: &BevRange<T>) -> bool {
        p.y <= r.y_max
    }
    fn at_x<T: Real>(a: &Vector2<T>, b: &Vector2<T>, x: T) -> Vector2<T> {
        let t = (x - a.x) / (b.x - a.x);
        Vector2::new(x, a.y + (b.y - a.y) * t)
    }
    fn at_y<T: Real>(a: &Vector2<T>, b: &Vector2<T>, y: T) -> Vector2<T> {
        let t = (y - a.y) / (b.y - a.y);
        Vector2::new(a.x + (b.x - a.x) * t, y)
    }
    let edges: [Edge<T>; 4] = [
        (inside_x_min, |a, b, r| at_x(a, b, r.x_min)),
        (inside_x_max, |a, b, r| at_x(a, b, r.x_max)),
        (inside_y_min, |a, b, r| at_y(a, b, r.y_min)),
        (inside_y_max, |a, b, r| at_y(a, b, r.y_max)),
    ];
    let mut poly = points.to_vec();
    for (inside, intersect) in edges {
        if poly.is_empty() {
            break;
        }
        let input = std::mem::take(&mut poly);
        let mut prev = input[input.len() - 1];
        for cur in input {
            match (inside(&cur, range), inside(&prev, range)) {
                (true, true) => poly.push(cur),
                (true, false) => {
                    poly.push(intersect(&prev, &cur, range));
                    poly.push(cur);
                }
                (false, true) => poly.push(intersect(&prev, &cur, range)),
                (false, false) => {}
            }
            prev = cur;
        }
    }
    let mut out: Vec<Vector2<T>> = Vec::with_capacity(poly.len());
    for p in poly.into_iter().map(|p| range.clamp(p)) {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Clips every element of an ego-frame layer to `range`. Open polylines that
/// leave and re-enter the range become several elements; elements left with
/// fewer than two points are dropped.
pub fn clip_to_range<T: Real>(
    layer: &MapLayer<T>,
    range: &BevRange<T>,
) -> Result<MapLayer<T>, MapError> {
    if layer.frame != Frame::Ego {
        return Err(MapError::WrongFrame {
            expected: Frame::Ego,
            found: layer.frame,
        });
    }
    let mut elements = Vec::new();
    for e in &layer.elements {
        if e.points.iter().all(|p| range.contains(p)) {
            elements.push(e.clone());
            continue;
        }
        let make = |points| MapElement {
            points,
            frame: e.frame,
            class: e.class,
            is_closed: e.is_closed,
        };
        if e.is_closed {
            let poly = clip_closed(&e.points, range);
            if poly.len() >= 2 {
                elements.push(make(poly));
            }
        } else {
            elements.extend(clip_open(&e.points, range).into_iter().map(make));
        }
    }
    Ok(MapLayer {
        frame: layer.frame,
        elements,
    })
}
