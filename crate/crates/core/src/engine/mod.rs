//! Planning and execution.
//!
//! [`optimize`] applies two rewrites to a bound plan and picks access paths:
//!
//! * R1: a default nearest-neighbour search filtered by `distance <= r` (or
//!   `< r`) becomes a range query with radius `r`; the filter stays.
//! * R2: `TOP n` over a bare default nearest-neighbour search, unordered or
//!   ordered by its distance ascending, becomes a kNN query with `k = n`.
//!
//! A search then runs on an attached metric index when one measures with
//! the search's distance function, otherwise sequentially. [`execute`]
//! evaluates the result; [`explain`] renders the plan.

mod eval;
mod exec;
mod explain;
mod optimize;
mod search;

pub use explain::explain;
pub use optimize::optimize;

use crate::binder::{bind, Plan, ParamBinding};
use crate::catalog::Catalog;
use crate::datamodel::ops::Row;
use crate::datamodel::Database;
use crate::error::Result;
use crate::parser::parse;

/// Which rewrites and access paths the optimizer may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizerOptions {
    pub r1: bool,
    pub r2: bool,
    pub use_indexes: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            r1: true,
            r2: true,
            use_indexes: true,
        }
    }
}

impl OptimizerOptions {
    /// No rewrites, sequential access everywhere: the reference evaluation.
    pub fn none() -> Self {
        OptimizerOptions {
            r1: false,
            r2: false,
            use_indexes: false,
        }
    }
}

/// A bound plan annotated with rewrites and access paths.
#[derive(Clone, Debug)]
pub struct PhysicalPlan {
    pub root: Plan,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Warnings raised during execution, e.g. an approximation budget
    /// smaller than the searched relation.
    pub notices: Vec<String>,
}

pub fn execute(plan: &PhysicalPlan, db: &Database) -> Result<ResultSet> {
    let mut ex = exec::Executor::new(db);
    let rows = ex.run(&plan.root)?;
    Ok(ResultSet {
        columns: plan.columns.clone(),
        rows,
        notices: ex.notices,
    })
}

/// Parses, binds, optimizes and executes `text`.
pub fn run_query(
    text: &str,
    catalog: &Catalog,
    db: &Database,
    params: &ParamBinding,
    opts: &OptimizerOptions,
) -> Result<ResultSet> {
    let query = parse(text)?;
    let bound = bind(&query, catalog, db, params)?;
    execute(&optimize(&bound, catalog, db, opts), db)
}
