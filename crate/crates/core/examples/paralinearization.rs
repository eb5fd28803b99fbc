//! Frequency sweep of `G(η)f` and of the paralinearization remainder
//! `G(η)f − T_λ f` for `f = cos(kx)`.
//!
//! ```text
//! cargo run --release --example paralinearization -- [amplitude] [N] [Nz]
//! ```

use waterwave::dn::{remainder_order_check, DirichletNeumann, DnBottom};
use waterwave::spectral::{GridSpec, SurfaceField};

fn main() -> waterwave::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let amplitude = args.first().copied().unwrap_or(0.1);
    let grid = GridSpec::new(1, args.get(1).map_or(128, |&n| n as usize), args.get(2).map_or(129, |&n| n as usize))?;
    let eta = SurfaceField::from_fn(&grid, |x| amplitude * x[0].cos());
    for bottom in [DnBottom::Dirichlet0, DnBottom::Neumann0] {
        let op = DirichletNeumann::for_surface(&eta, bottom)?;
        let report = remainder_order_check(&op, 2..=grid.n / 4)?;
        println!("{bottom:?}");
        println!("{:>4} {:>12} {:>12}", "k", "|G f|", "|G f - T f|");
        for ((k, g), r) in report.wavenumbers.iter().zip(&report.dn_norms).zip(&report.remainder_norms) {
            println!("{k:>4} {g:>12.4e} {r:>12.4e}");
        }
        let (dn, rem) = report.slopes_between(8.0, f64::INFINITY);
        println!("slopes: DN {:.3}, remainder {:.3}, gain {:.2}", report.dn_slope, report.remainder_slope, report.gain());
        println!("slopes for k >= 8: DN {dn:.3}, remainder {rem:.3}\n");
    }
    Ok(())
}
