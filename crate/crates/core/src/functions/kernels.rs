//! Scalar-generic vector distance kernels.

use crate::error::{Error, Result};
use crate::scalar::DistanceScalar;

fn check_dims<S>(x: &[S], y: &[S]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::runtime(format!(
            "vector dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Sum of absolute coordinate differences.
pub fn l1<S: DistanceScalar>(x: &[S], y: &[S]) -> Result<S> {
    check_dims(x, y)?;
    Ok(x.iter()
        .zip(y)
        .fold(S::zero(), |acc, (&a, &b)| acc + (a - b).abs()))
}

/// Euclidean norm of the difference.
pub fn l2<S: DistanceScalar>(x: &[S], y: &[S]) -> Result<S> {
    check_dims(x, y)?;
    Ok(x.iter()
        .zip(y)
        .fold(S::zero(), |acc, (&a, &b)| {
            let d = a - b;
            acc + d * d
        })
        .sqrt())
}

/// Per-coordinate weight profile of a weighted Euclidean distance.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightProfile<S> {
    /// The same weight on every coordinate, whatever the dimension.
    Uniform(S),
    PerCoordinate(Vec<S>),
}

/// `sqrt(sum_i w_i (x_i - y_i)^2)`.
pub fn weighted_l2<S: DistanceScalar>(x: &[S], y: &[S], profile: &WeightProfile<S>) -> Result<S> {
    check_dims(x, y)?;
    let weight = |i: usize| match profile {
        WeightProfile::Uniform(w) => Ok(*w),
        WeightProfile::PerCoordinate(ws) => ws.get(i).copied().ok_or_else(|| {
            Error::runtime(format!(
                "weight profile has {} coordinates, vector has {}",
                ws.len(),
                x.len()
            ))
        }),
    };
    let mut acc = S::zero();
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let d = a - b;
        acc = acc + weight(i)? * d * d;
    }
    Ok(acc.sqrt())
}

/// `sum_i w_i d_i`; a part with positive weight and infinite distance makes
/// the whole sum infinite, a zero weight ignores its part.
pub fn weighted_sum<S: DistanceScalar>(parts: &[(S, S)]) -> Result<S> {
    let mut acc = S::zero();
    for &(d, w) in parts {
        if w < S::zero() || w.is_nan() {
            return Err(Error::runtime(format!("negative weight {w}")));
        }
        if w == S::zero() {
            continue;
        }
        acc = acc + w * d;
    }
    Ok(acc)
}
