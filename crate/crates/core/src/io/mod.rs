//! Run configuration, snapshots, diagnostics CSV and run orchestration.

mod config;
mod csv;
mod run;
mod snapshot;

pub use config::{BackendChoice, InitialCondition, RunConfig, CONFIG_KEYS};
pub use csv::{diagnostics_csv, emit_plot_data, parse_diagnostics, plot_data, read_diagnostics, write_diagnostics, DiagnosticsTable};
pub use run::{exit_code, initial_state, resolve_output_dir, run_simulation, run_simulation_in, RunSummary, OUTPUT_DIR_ENV};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_VERSION};
