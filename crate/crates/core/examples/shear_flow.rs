//! A surface wave riding on a linear shear current `v¹ = ω₀(y + 1)`,
//! with the per-step diagnostics table.
//!
//! ```text
//! cargo run --release --example shear_flow -- [omega0] [amplitude] [T]
//! ```

use waterwave::diagnostics::{Monitor, MonitorSettings};
use waterwave::dynamics::{run, Model, StepSize, WaveState};
use waterwave::spectral::{GridSpec, SurfaceField};

fn main() -> waterwave::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let omega0 = args.first().copied().unwrap_or(0.5);
    let amplitude = args.get(1).copied().unwrap_or(0.02);
    let t_final = args.get(2).copied().unwrap_or(3.0);
    let grid = GridSpec::new(1, 64, 33)?;

    let mut initial = WaveState::shear(&grid, omega0);
    initial.eta = SurfaceField::from_fn(&grid, |x| amplitude * x[0].cos());
    // trace of the same shear on the displaced surface
    initial.v[0] = initial.eta.map(|h| omega0 * (1.0 + h));
    let model = Model::default().freeze_delta(&initial.eta)?;
    let mut monitor = Monitor::new(MonitorSettings { zeta_residual: false, ..MonitorSettings::default() });
    let mut failure = None;
    println!("{:>7} {:>13} {:>9} {:>10} {:>10} {:>10}", "t", "E_basic", "a_min", "div", "curl", "|eta|_max");
    let mut count = 0;
    let out = run(&model, initial, t_final, StepSize::Cfl, |s, e, dt| match monitor.record(&model, s, e, dt) {
        Ok(r) => {
            if count % 10 == 0 {
                println!(
                    "{:>7.3} {:>13.6e} {:>9.6} {:>10.2e} {:>10.2e} {:>10.4e}",
                    r.t, r.e_basic, r.a_min, r.div_residual, r.curl_residual, s.eta.max_abs()
                );
            }
            count += 1;
        }
        Err(err) => failure = Some(err),
    });
    if let Some(e) = out.abort.or(failure) {
        return Err(e);
    }
    let mean_drift = out.last.eta.mean();
    println!("{} steps to t = {:.3}; mean surface elevation {mean_drift:.2e}", out.steps, out.last.t);
    Ok(())
}
