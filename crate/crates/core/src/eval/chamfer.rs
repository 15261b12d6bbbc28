use nalgebra::Vector2;

use super::EvalError;
use crate::scalar::Real;

/// Symmetric Chamfer distance
/// `1/(2n) sum_i min_j |a_i - b_j| + 1/(2m) sum_j min_i |b_j - a_i|`.
pub fn chamfer<T: Real>(a: &[Vector2<T>], b: &[Vector2<T>]) -> Result<T, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::EmptyPointSet);
    }
    let nearest_sum = |from: &[Vector2<T>], to: &[Vector2<T>]| {
        from.iter().fold(T::zero(), |acc, p| {
            acc + to
                .iter()
                .map(|q| (p - q).norm())
                .fold(T::max_value().unwrap_or_else(T::one), |m, d| m.min(d))
        })
    };
    let two = T::lit(2.0);
    let n = T::lit(a.len() as f64);
    let m = T::lit(b.len() as f64);
    Ok(nearest_sum(a, b) / (two * n) + nearest_sum(b, a) / (two * m))
}
