//! Embeddable similarity-query engine for the SimSeQL language.
//!
//! SimSeQL is ordinary `SELECT ... FROM ... WHERE ... GROUP BY ... HAVING ...
//! ORDER BY` extended with a `SIMSEARCH` construct in the `FROM` clause. A
//! similarity search names its query objects, the relations it searches
//! (`IN`), how distance is measured (`BY`) and optionally the search method
//! (`METHOD`). Its output is an ordinary relation carrying an extra distance
//! attribute.
//!
//! Processing follows the classic pipeline:
//!
//! 1. [`parser`] turns text into a [`parser::Query`] tree,
//! 2. [`binder`] resolves every name against the [`catalog::Catalog`] and a
//!    [`datamodel::Database`], type-checks, and builds a [`binder::BoundPlan`],
//! 3. [`engine::optimize`] applies the range and top-n pushdowns and picks
//!    access paths (metric index, ordered index or sequential scan),
//! 4. [`engine::execute`] evaluates the physical plan.
//!
//! Numeric kernels and the vantage-point tree are generic over the distance
//! scalar (see [`scalar::DistanceScalar`]); the engine itself runs on
//! [`Dist`] (`f64`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binder;
pub mod catalog;
pub mod datamodel;
pub mod engine;
mod error;
pub mod functions;
pub mod indexes;
pub mod parser;
pub mod scalar;

pub use error::{Error, ErrorKind, Pos, Result};

/// Scalar type of every distance the engine computes.
pub type Dist = f64;

/// Vantage-point tree over engine values with `f64` distances.
pub type MetricTree = indexes::VpTree<datamodel::Value, Dist>;

/// Single-precision vantage-point tree, handy for compact numeric data sets.
pub type MetricTreeF32<T> = indexes::VpTree<T, f32>;

pub use binder::{bind, BoundPlan, ParamBinding};
pub use catalog::Catalog;
pub use datamodel::{Database, Relation, Schema, Value};
pub use engine::{execute, explain, optimize, run_query, OptimizerOptions, PhysicalPlan, ResultSet};
pub use parser::{parse, print, Query};
