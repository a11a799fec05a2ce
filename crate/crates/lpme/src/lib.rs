//! Model files, reports and the `lpme` command line.

pub mod cli;
pub mod error;
pub mod format;
pub mod report;
pub mod schema;

pub use error::{CliError, CliResult};
pub use schema::{load_model, read_model_file, save_model, ModelFile};
