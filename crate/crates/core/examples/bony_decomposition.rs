//! Littlewood–Paley blocks of a random field and the Bony split
//! `au = T_a u + T_u a + R(u, a)`.
//!
//! ```text
//! cargo run --release --example bony_decomposition -- [N] [seed]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use waterwave::checks::random_field;
use waterwave::paradiff::{bony_remainder, paraproduct};
use waterwave::spectral::dyadic::block_support;
use waterwave::spectral::{sobolev_norm, DyadicDecomposition, GridSpec};

fn main() -> waterwave::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().and_then(|s| s.parse().ok()).unwrap_or(128);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let grid = GridSpec::new(1, n, 9)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_field(&grid, &mut rng, grid.max_wavenumber() / 3.0, 1.0);
    let u = random_field(&grid, &mut rng, grid.max_wavenumber() / 3.0, 0.5);

    let dec = DyadicDecomposition::new(&u);
    println!("{:>3} {:>16} {:>12}", "k", "annulus", "|Δ_k u|_L2");
    for (k, block) in &dec.blocks {
        let (lo, hi) = block_support(*k).expect("k >= 0");
        println!("{k:>3} {:>16} {:>12.4e}", format!("[{lo:.2}, {hi:.2}]"), block.l2_norm());
    }
    println!("reconstruction error {:.2e}", (&dec.reconstruct() - &u).max_abs());
    println!("H^1 norm of u {:.4e}", sobolev_norm(&u, 1.0)?);

    let tau = paraproduct(&a, &u)?;
    let tua = paraproduct(&u, &a)?;
    let r = bony_remainder(&u, &a)?;
    let defect = (&a.product(&u) - &(&(&tau + &tua) + &r)).max_abs();
    println!("|T_a u| = {:.4e}, |T_u a| = {:.4e}, |R(u,a)| = {:.4e}", tau.l2_norm(), tua.l2_norm(), r.l2_norm());
    println!("Bony defect {defect:.2e} (relative {:.2e})", defect / (a.max_abs() * u.max_abs()));
    Ok(())
}
