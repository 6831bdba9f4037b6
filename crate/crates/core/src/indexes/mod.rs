//! Access paths: sequential scan, a vantage-point metric index and a
//! sorted-array ordered index.
//!
//! Every path honours an [`ApproximationBudget`] counted in distance
//! evaluations. Evaluation order is deterministic and independent of the
//! budget, so a smaller budget always sees a prefix of what a larger one
//! sees.

mod attached;
mod ordered;
mod seq;
mod vptree;

pub use attached::{
    build_metric_index, build_ordered_index, AttachedIndex, MetricIndex, MetricNearest, ValueOrderedIndex,
    DEFAULT_INDEX_SEED,
};
pub use ordered::{CompareOp, OrderedIndex};
pub use seq::{seq_search, Selection};
pub use vptree::{Nearest, VpTree, LEAF_CAPACITY, PIVOT_CANDIDATES};

use std::fmt;

/// Maximum number of distance evaluations a search may perform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ApproximationBudget(Option<usize>);

impl ApproximationBudget {
    pub const UNLIMITED: Self = ApproximationBudget(None);

    pub fn limit(max_visited: usize) -> Self {
        ApproximationBudget(Some(max_visited))
    }

    pub fn max_visited(self) -> Option<usize> {
        self.0
    }

    pub fn is_unlimited(self) -> bool {
        self.0.is_none()
    }

    /// Whether one more evaluation is allowed after `done` of them.
    pub fn allows(self, done: usize) -> bool {
        self.0.is_none_or(|m| done < m)
    }
}

impl fmt::Display for ApproximationBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(m) => write!(f, "{m}"),
            None => f.write_str("unlimited"),
        }
    }
}

/// Hits in ascending `(distance, key)` order plus the number of distance
/// evaluations spent.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome<K, S> {
    pub hits: Vec<(K, S)>,
    pub evaluations: usize,
}
