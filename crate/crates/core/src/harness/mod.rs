//! Fixtures, test functions, audits and the scenario runner behind the CLI.

mod commands;
mod fixture;
mod report;
mod runner;
mod scenario;
mod test_function;

pub use commands::{execute, write_fields, BoxdimConfig, Command, FluxField, FractalRegion, FractintConfig, MollifyConfig, Overrides, WhitneyConfig};
pub use fixture::Fixture;
pub use report::{AuditReport, AuditSummary, RunSummary, Status, Table};
pub use runner::{crop, nominal_cells, run, Prepared, Runner};
pub use scenario::{AuditSpec, ChartBox, RegionSpec, Scenario, Tolerances};
pub use test_function::{legendre, SphereFunction, TestFunction};
