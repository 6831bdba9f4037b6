//! Values, schemas, tuples and relations.

pub mod ops;
mod relation;
mod schema;
mod value;

pub use ops::Row;
pub use relation::{make_relation, Database, Relation, RowId, Tuple};
pub use schema::{Attribute, DataTypeId, Name, Schema};
pub use value::{format_significant, ImageRaster, Value, ValueKind};

use crate::Dist;

/// A candidate produced by a similarity search: the (possibly concatenated)
/// source row, its enumeration key and the measured distance.
///
/// `key` holds the scan position of the row within each source, so that
/// ties on distance break the same way on every access path.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceAnnotatedTuple {
    pub key: Vec<usize>,
    pub row: Row,
    pub distance: Dist,
}

impl DistanceAnnotatedTuple {
    /// Ascending distance, then enumeration key.
    pub fn order(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.key.cmp(&b.key))
    }
}
