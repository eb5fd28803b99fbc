//! Strip solve of a manufactured problem over a curved surface with both
//! backends: residual correction with the flat solver and the parabolic
//! factorization preconditioner.
//!
//! ```text
//! cargo run --release --example elliptic_backends -- [amplitude] [N] [Nz]
//! ```

use std::time::Instant;

use waterwave::elliptic::{Backend, BottomCondition, EllipticProblem};
use waterwave::geometry::{EllipticCoefficients, FlatteningMap};
use waterwave::spectral::{GridSpec, StripField, SurfaceField};

fn main() -> waterwave::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let amplitude = args.first().copied().unwrap_or(0.15);
    let grid = GridSpec::new(1, args.get(1).map_or(64, |&n| n as usize), args.get(2).map_or(33, |&n| n as usize))?;
    let eta = SurfaceField::from_fn(&grid, |x| amplitude * (x[0].cos() + 0.3 * (2.0 * x[0]).sin()));
    let map = FlatteningMap::build(&eta, 0.5, None)?;
    let coeffs = EllipticCoefficients::from_map(&map);
    println!("delta = {:.3}, ellipticity c2 = {:.4}", map.delta(), coeffs.ellipticity());

    let exact = StripField::from_fn(&grid, |x, z| (x[0] + 0.4).sin() * (1.2 * z).exp() + 0.3 * (3.0 * x[0]).cos() * (z + 1.0).powi(2));
    let probe = EllipticProblem::new(coeffs.clone(), StripField::zeros(&grid), exact.top(), BottomCondition::dirichlet_zero(&grid));
    let f0 = probe.apply_operator(&exact);
    for (name, bottom) in [("Dirichlet", BottomCondition::Dirichlet(exact.bottom())), ("Neumann", BottomCondition::Neumann(exact.dz().bottom()))] {
        let problem = EllipticProblem::new(coeffs.clone(), f0.clone(), exact.top(), bottom);
        let mut solutions = Vec::new();
        for backend in [Backend::Direct, Backend::Factored] {
            let start = Instant::now();
            let sol = problem.solve(backend)?;
            println!(
                "{name:>9} {backend:?}: {:>3} iterations, residual {:.1e}, error {:.2e}, {:.1?}",
                sol.iterations,
                sol.residual,
                sol.v.sub(&exact).l2_norm() / exact.l2_norm(),
                start.elapsed()
            );
            solutions.push(sol.v);
        }
        println!("{name:>9} backend gap {:.2e}", solutions[0].sub(&solutions[1]).l2_norm());
    }
    Ok(())
}
