//! Scenario files, suite orchestration, reports and parameter sweeps behind
//! the `capillab` binary.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::{resolve_suites, BoundsConfig, OutputConfig, Scenario, SpectraConfig, Suite, TolerancesConfig};
pub use report::{Check, GeometrySummary, Provenance, Relation, ScenarioReport, SuiteReport, Table};
pub use run::{run_scenario, write_outputs};
pub use sweep::{parse_value, parse_values, sweep, Axis, SWEEP_HEADER};
