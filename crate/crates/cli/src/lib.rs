//! Batch runner and interactive shell for SimSeQL.
//!
//! A [`Session`] holds a catalog, the loaded relations, parameter bindings
//! and the output mode. Scripts mix queries and catalog statements ending
//! in `;` with one-line `\` directives; see [`ddl`] for the statement forms
//! and [`tsv`] for the data file format.

pub mod ddl;
mod error;
pub mod fixtures;
pub mod render;
pub mod script;
pub mod session;
pub mod tsv;

pub use error::{CliError, Result, ScriptError};
pub use render::{render, OutputMode, ResultView};
pub use session::{QueryOutput, Session};
