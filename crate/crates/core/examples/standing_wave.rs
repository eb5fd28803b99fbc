//! Linear standing wave: measured period against `2π/√(k tanh k)` and the
//! drift of the basic energy over one period.
//!
//! ```text
//! cargo run --release --example standing_wave -- [mode] [N] [Nz] [cfl]
//! ```

use waterwave::diagnostics::basic_energy;
use waterwave::dynamics::{run, Model, StepSize, WaveState};
use waterwave::spectral::GridSpec;

fn main() -> waterwave::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let mode = arg(0, 2.0) as usize;
    let grid = GridSpec::new(1, arg(1, 128.0) as usize, arg(2, 33.0) as usize)?;
    let amplitude = 1e-4;
    let k = mode as f64;
    let period = 2.0 * std::f64::consts::PI / (k * k.tanh()).sqrt();

    let initial = WaveState::standing_wave(&grid, amplitude, mode);
    let model = Model { cfl_safety: arg(3, 0.5), ..Model::default() }.freeze_delta(&initial.eta)?;
    let mut samples = Vec::new();
    let mut energy = Vec::new();
    let start = std::time::Instant::now();
    let out = run(&model, initial, 1.1 * period, StepSize::Cfl, |s, e, _| {
        // Fourier coefficient of cos(kx)
        let c = s.eta.coeffs()[mode].re * 2.0;
        samples.push((s.t, c));
        energy.push((s.t, basic_energy(&s.eta, &e.map, &e.velocity.v)));
    });
    if let Some(e) = out.abort {
        return Err(e);
    }
    // upward zero crossings of the mode amplitude after the first trough
    let mut crossings = Vec::new();
    for w in samples.windows(2) {
        let ((t0, a0), (t1, a1)) = (w[0], w[1]);
        if a0 < 0.0 && a1 >= 0.0 || a0 > 0.0 && a1 <= 0.0 {
            crossings.push(t0 + (t1 - t0) * a0 / (a0 - a1));
        }
    }
    let measured = 2.0 * (crossings[1] - crossings[0]);
    let e0 = energy[0].1;
    let drift = energy.iter().map(|(_, e)| (e - e0).abs() / e0).fold(0.0, f64::max) / out.last.t;
    println!("mode {mode}: steps {}, wall {:.1?}", out.steps, start.elapsed());
    println!("period: measured {measured:.6}, linear theory {period:.6}, relative error {:.2e}", (measured / period - 1.0).abs());
    println!("energy: E(0) = {e0:.6e}, max relative drift per unit time {drift:.2e}");
    Ok(())
}
