//! Dirichlet–Neumann operator of the flat surface against `k coth k`
//! (Dirichlet bottom) and `k tanh k` (Neumann bottom).
//!
//! ```text
//! cargo run --release --example flat_dn_dispersion -- [N] [Nz]
//! ```

use waterwave::dn::{DirichletNeumann, DnBottom};
use waterwave::spectral::{GridSpec, SurfaceField};

fn main() -> waterwave::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let grid = GridSpec::new(1, args.first().copied().unwrap_or(128), args.get(1).copied().unwrap_or(65))?;
    let flat = SurfaceField::zeros(&grid);
    let dirichlet = DirichletNeumann::for_surface(&flat, DnBottom::Dirichlet0)?;
    let neumann = DirichletNeumann::for_surface(&flat, DnBottom::Neumann0)?;
    println!("{:>4} {:>14} {:>10} {:>14} {:>10}", "k", "k coth k", "error", "k tanh k", "error");
    for k in (1..=grid.n / 4).filter(|k| k.is_power_of_two() || k % 10 == 0) {
        let kf = k as f64;
        let f = SurfaceField::from_fn(&grid, |x| (kf * x[0]).cos());
        let rate = |g: &SurfaceField| g.inner(&f) / f.inner(&f);
        let gd = rate(&dirichlet.apply(&f)?);
        let gn = rate(&neumann.apply(&f)?);
        let (cd, cn) = (kf / kf.tanh(), kf * kf.tanh());
        println!("{k:>4} {cd:>14.10} {:>10.2e} {cn:>14.10} {:>10.2e}", (gd / cd - 1.0).abs(), (gn / cn - 1.0).abs());
    }
    Ok(())
}
