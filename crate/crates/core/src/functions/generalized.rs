//! Set and aggregated distances built from element distances.

use crate::error::{Error, Result};
use crate::functions::kernels;
use crate::Dist;

/// Minimum of `elem(q, candidate)` over the query set.
pub fn set_distance_minimum<Q, C, F>(queries: &[Q], candidate: &C, mut elem: F) -> Result<Dist>
where
    F: FnMut(&Q, &C) -> Result<Dist>,
{
    if queries.is_empty() {
        return Err(Error::runtime("set distance 'minimum' needs at least one query object"));
    }
    let mut best = Dist::INFINITY;
    for q in queries {
        best = best.min(elem(q, candidate)?);
    }
    Ok(best)
}

/// Minimum of already computed element distances.
pub fn minimum_of(distances: &[Dist]) -> Result<Dist> {
    set_distance_minimum(distances, &(), |d, _| Ok(*d))
}

/// `sum_i w_i d_i` over (distance, weight) parts.
pub fn weight_sum(parts: &[(Dist, f64)]) -> Result<Dist> {
    kernels::weighted_sum(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimum_of_element_distances() {
        let d = |q: &i32, x: &i32| Ok((q - x).abs() as f64);
        assert_eq!(set_distance_minimum(&[7, 5], &4, d).unwrap(), 1.0);
        assert_eq!(set_distance_minimum(&[5, 7], &4, d).unwrap(), 1.0);
        assert_eq!(set_distance_minimum(&[4], &4, d).unwrap(), 0.0);
        assert!(set_distance_minimum(&[] as &[i32], &4, d).is_err());
    }

    #[test]
    fn weight_sum_examples() {
        assert!((weight_sum(&[(2.0, 0.7), (5.0, 0.2)]).unwrap() - 2.4).abs() < 1e-12);
        assert_eq!(weight_sum(&[(0.0, 0.3), (0.0, 5.0)]).unwrap(), 0.0);
        assert_eq!(weight_sum(&[(3.25, 1.0)]).unwrap(), 3.25);
        assert!(weight_sum(&[(1.0, -1.0)]).is_err());
    }
}
