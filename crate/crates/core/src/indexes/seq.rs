//! Sequential scan, the access path every method supports.

use super::{ApproximationBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::scalar::DistanceScalar;

/// What a search keeps of the evaluated candidates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selection<S> {
    /// Every evaluated candidate.
    All,
    Knn(usize),
    Range(S),
}

/// Evaluates candidates in order (at most `budget` of them), sorts them by
/// `(distance, key)` and applies the selection.
pub fn seq_search<K, S, I, F>(
    candidates: I,
    selection: Selection<S>,
    budget: ApproximationBudget,
    mut evaluate: F,
) -> Result<SearchOutcome<K, S>>
where
    K: Ord,
    S: DistanceScalar,
    I: IntoIterator<Item = K>,
    F: FnMut(&K) -> Result<S>,
{
    match selection {
        Selection::Knn(0) => return Err(Error::runtime("k must be at least 1")),
        Selection::Range(r) if !(r >= S::zero()) => {
            return Err(Error::runtime(format!("range radius must be non-negative, got {r}")))
        }
        _ => {}
    }
    let mut hits = Vec::new();
    let mut evaluations = 0;
    for c in candidates {
        if !budget.allows(evaluations) {
            break;
        }
        evaluations += 1;
        let d = evaluate(&c)?;
        if d.is_nan() || d < S::zero() {
            return Err(Error::runtime(format!("invalid distance {d}")));
        }
        if let Selection::Range(r) = selection {
            if !(d <= r) {
                continue;
            }
        }
        hits.push((c, d));
    }
    hits.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    if let Selection::Knn(k) = selection {
        hits.truncate(k);
    }
    Ok(SearchOutcome { hits, evaluations })
}
