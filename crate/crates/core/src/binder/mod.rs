//! Name resolution and type checking.
//!
//! [`bind`] turns a parsed query into a logical [`Plan`] whose expressions
//! refer to columns by position. Every distance function, search method and
//! extractor is looked up in the catalog here, so that a plan that binds
//! can only fail at run time on data (dimension mismatches, bad images).

mod bind;
pub mod plan;
pub mod schema;

use indexmap::IndexMap;

pub use plan::*;
pub use schema::{ColumnInfo, ColumnOrigin, ColumnRole, RowSchema, Ty, DISTANCE_COLUMN, RANK_COLUMN};

use crate::catalog::Catalog;
use crate::datamodel::{Database, Name, Value};
use crate::error::Result;
use crate::parser::Query;

/// Values of the `:name` parameters of a query.
#[derive(Clone, Debug, Default)]
pub struct ParamBinding(IndexMap<Name, Value>);

impl ParamBinding {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name` (with or without the leading `:`).
    pub fn set(&mut self, name: &str, value: Value) {
        self.0.insert(Name::new(name.trim_start_matches(':')), value);
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(&Name::new(name.trim_start_matches(':')))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A bound query: its logical plan and output column names.
#[derive(Clone, Debug)]
pub struct BoundPlan {
    pub root: Plan,
    pub columns: Vec<String>,
}

pub fn bind(query: &Query, catalog: &Catalog, db: &Database, params: &ParamBinding) -> Result<BoundPlan> {
    let mut b = bind::Binder {
        catalog,
        db,
        params,
        next_subquery: 0,
    };
    let root = b.bind_query(query)?;
    let columns = root.schema.columns.iter().map(|c| c.name.to_string()).collect();
    Ok(BoundPlan { root, columns })
}
