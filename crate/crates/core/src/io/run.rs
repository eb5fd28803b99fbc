use std::path::{Path, PathBuf};

use super::config::{BackendChoice, InitialCondition, RunConfig};
use super::csv::write_diagnostics;
use super::snapshot::{read_snapshot, write_snapshot};
use crate::diagnostics::{breakdown_report, BreakdownReport, DiagnosticsRecord, Hypothesis, Monitor, MonitorSettings};
use crate::dn::DirichletNeumann;
use crate::dynamics::{recover_velocity, run, Model, WaveState};
use crate::elliptic::Backend;
use crate::error::{Error, Result};

pub const OUTPUT_DIR_ENV: &str = "WW_OUTPUT_DIR";

/// Process exit status for a run that stopped on `err`.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DepthViolation { .. } => 2,
        Error::NonFinite(_) => 3,
        Error::NoConvergence { .. }
        | Error::Instability { .. }
        | Error::EllipticityViolation { .. }
        | Error::FlatteningFailure { .. }
        | Error::TaylorSignViolation { .. } => 4,
        _ => 1,
    }
}

/// Short abort tag used in the CSV comment row.
fn abort_reason(err: &Error) -> String {
    let kind = match exit_code(err) {
        2 => "depth violation",
        3 => "non-finite state",
        4 => "solver failure",
        _ => "error",
    };
    let text = err.to_string();
    if text.starts_with(kind) {
        text
    } else {
        format!("{kind}: {text}")
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub records: Vec<DiagnosticsRecord>,
    pub report: BreakdownReport,
    pub abort: Option<Error>,
    pub steps: usize,
    pub final_state: WaveState,
    pub output_dir: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        self.abort.as_ref().map_or(0, exit_code)
    }
}

/// `WW_OUTPUT_DIR` when set, otherwise the configured directory.
pub fn resolve_output_dir(config: &RunConfig) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| config.output_dir.clone(), PathBuf::from)
}

pub fn initial_state(config: &RunConfig) -> Result<WaveState> {
    let grid = config.grid()?;
    Ok(match &config.initial {
        InitialCondition::Rest => WaveState::rest(&grid),
        InitialCondition::StandingWave { amplitude, mode } => WaveState::standing_wave(&grid, *amplitude, *mode),
        InitialCondition::Shear { omega0 } => WaveState::shear(&grid, *omega0),
        InitialCondition::Stream { c } => WaveState::stream(&grid, *c),
        InitialCondition::File(path) => {
            let s = read_snapshot(path)?;
            if *s.grid() != grid {
                return Err(Error::Validation {
                    field: "initial.path".into(),
                    message: format!("snapshot grid {:?} differs from the configured grid", s.grid()),
                });
            }
            s
        }
    })
}

pub fn run_simulation(config: &RunConfig) -> Result<RunSummary> {
    run_simulation_in(config, &resolve_output_dir(config))
}

/// Execute a run writing `diagnostics.csv`, snapshots and `report.txt` under `dir`.
pub fn run_simulation_in(config: &RunConfig, dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let initial = initial_state(config)?;
    let base = config.model();
    let model = base.freeze_delta(&initial.eta).unwrap_or(base);
    let factored = Model { settings: crate::dn::SolverSettings { backend: Backend::Factored, ..model.settings }, ..model };
    let mut monitor = Monitor::new(MonitorSettings { s: config.s, curvature_p: config.curvature_p, zeta_residual: config.zeta_residual });
    let mut records = Vec::new();
    let mut failure: Option<Error> = None;
    let mut step = 0usize;
    let mut io_error: Option<Error> = None;

    let outcome = run(&model, initial, config.t_final, config.step_size(), |state, eval, dt| {
        if failure.is_some() {
            return;
        }
        match monitor.record(&model, state, eval, dt) {
            Ok(mut r) => {
                if config.elliptic_backend == BackendChoice::Both {
                    r.backend_gap = match recover_velocity(&factored, state, &eval.map, &eval.coeffs) {
                        Ok(vf) => vf.v.iter().zip(&eval.velocity.v).map(|(a, b)| a.sub(b).l2_norm().powi(2)).sum::<f64>().sqrt(),
                        Err(_) => f64::INFINITY,
                    };
                }
                records.push(r);
            }
            Err(e) => failure = Some(e),
        }
        if dt.is_some() {
            step += 1;
            if config.snapshot_every > 0 && step.is_multiple_of(config.snapshot_every) {
                if let Err(e) = write_snapshot(state, &dir.join(format!("snapshot_{step:06}.wwsn"))) {
                    io_error.get_or_insert(e);
                }
            }
        }
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    let abort = outcome.abort.or(failure);
    let reason = abort.as_ref().map(abort_reason);
    write_diagnostics(&dir.join("diagnostics.csv"), &records, reason.as_deref())?;
    write_snapshot(&outcome.last, &dir.join("final.wwsn"))?;

    let mut report = breakdown_report(&records, config.c0, config.h0, reason.clone());
    if matches!(abort, Some(Error::DepthViolation { .. })) && report.depth_violation.is_none() {
        report.depth_violation = Some(outcome.last.t);
        report.first_failure.get_or_insert(Hypothesis::Depth);
    }
    let mut text = report.to_string();
    for w in &config.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    if abort.is_none() {
        if let Ok(op) = DirichletNeumann::for_surface(&outcome.last.eta, config.dn_bottom) {
            if let Ok(q) = op.positivity_check(&outcome.last.eta) {
                text.push_str(&format!("final <G(eta) eta, eta> ({:?} bottom) = {q:?}\n", config.dn_bottom));
            }
        }
    }
    let path = dir.join("report.txt");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;

    Ok(RunSummary { records, report, abort, steps: outcome.steps, final_state: outcome.last, output_dir: dir.to_path_buf() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::csv::read_diagnostics;

    #[test]
    fn rest_run_is_constant() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::parse_str("grid.N = 16\ngrid.Nz = 9\nT_final = 1\ndt = 0.25").unwrap();
        let s = run_simulation_in(&config, dir.path()).unwrap();
        assert_eq!(s.exit_code(), 0);
        assert_eq!(s.steps, 4);
        let table = read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(table.records.len(), 5);
        assert!(table.abort.is_none());
        for r in &table.records {
            assert_eq!(r.e_basic, 0.0);
            assert!((r.a_min - 1.0).abs() < 1e-12);
        }
        assert!(dir.path().join("final.wwsn").exists());
        assert!(dir.path().join("report.txt").exists());
    }

    #[test]
    fn depth_abort_exits_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::parse_str(
            "grid.N = 16\ngrid.Nz = 9\nT_final = 1\nh0 = 1.5\ninitial.kind = standing_wave\ninitial.amplitude = 0.3\ninitial.mode = 1",
        )
        .unwrap();
        let s = run_simulation_in(&config, dir.path()).unwrap();
        assert_eq!(s.exit_code(), 2);
        assert_eq!(s.report.first_failure, Some(Hypothesis::Depth));
        let table = read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap();
        assert!(table.abort.unwrap().starts_with("depth violation"));
        assert!(dir.path().join("final.wwsn").exists());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::DepthViolation { min_depth: 0.1, floor: 0.5 }), 2);
        assert_eq!(exit_code(&Error::NonFinite("x")), 3);
        assert_eq!(exit_code(&Error::NoConvergence { iterations: 1, residual: 1.0 }), 4);
    }
}
