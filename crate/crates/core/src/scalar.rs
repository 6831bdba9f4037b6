//! Distance scalar abstraction.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type a distance can be measured in: `f32` or `f64`.
pub trait DistanceScalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for user supplied radii and weights.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl DistanceScalar for f32 {}
impl DistanceScalar for f64 {}

/// Slack used when pruning with the triangle inequality so that rounding
/// never discards an exact boundary hit.
pub fn pruning_slack<S: DistanceScalar>(a: S, b: S) -> S {
    let scale = S::one().max(a.abs()).max(b.abs());
    scale * S::epsilon() * S::from_f64_lossy(64.0)
}
