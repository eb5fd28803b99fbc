//! Configured runs through the break-down monitor: a Taylor-sign threshold
//! crossed during the motion, then a trough deep enough to abort on depth.
//!
//! ```text
//! cargo run --release --example breakdown_monitor -- [kick] [c0]
//! ```

use waterwave::dynamics::WaveState;
use waterwave::io::{run_simulation_in, write_snapshot, RunConfig};
use waterwave::spectral::GridSpec;

fn main() -> waterwave::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let kick = args.first().copied().unwrap_or(-0.2);
    let c0 = args.get(1).copied().unwrap_or(0.95);
    let dir = std::env::temp_dir().join(format!("ww-breakdown-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| waterwave::Error::Io { path: dir.clone(), source: e })?;

    let grid = GridSpec::new(1, 32, 17)?;
    for (name, kick, h0, c0) in [("taylor", kick, 0.5, c0), ("depth", -0.3, 1.6, 0.5)] {
        let initial = dir.join(format!("{name}.wwsn"));
        write_snapshot(&WaveState::potential_mode(&grid, 1, kick), &initial)?;
        let config = RunConfig::parse_str(&format!(
            "grid.N = 32\ngrid.Nz = 17\nT_final = 3\nc0 = {c0}\nh0 = {h0}\ninitial.kind = file\ninitial.path = {}\n",
            initial.display()
        ))?;
        let out = dir.join(name);
        let summary = run_simulation_in(&config, &out)?;
        println!("== {name}: exit {}, {} steps, outputs in {}", summary.exit_code(), summary.steps, out.display());
        println!("{}", summary.report);
    }
    Ok(())
}
