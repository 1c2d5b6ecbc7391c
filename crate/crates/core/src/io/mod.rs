//! File formats: FCIDUMP integrals, run configuration, result tables and
//! shot records.

pub mod config;
pub mod fcidump;
pub mod results;

pub use config::{default_beta_grid, load_run_config, log_grid, GroundStateMode, RunConfig, ShotCount};
pub use fcidump::{parse_fcidump, read_fcidump, MolecularIntegrals};
pub use results::{write_results, AggregateRow, ResultRow, ResultsTable};
