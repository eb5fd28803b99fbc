//! Littlewood–Paley cutoffs and dyadic blocks.
//!
//! Indexing follows the usual inhomogeneous convention: block `0` is the low
//! block `φ_0 = ζ` and blocks `k ≥ 1` are the annuli `φ_k = ζ_k − ζ_{k−1}`
//! with `ζ_k(θ) = ζ(2^{-k} θ)`. Blocks with negative index are zero, and so is
//! `S_k` for `k < 0`.

use num_complex::Complex64;

use super::field::SurfaceField;
use super::grid::GridSpec;

/// Inner radius where the base bump `ζ` starts to decay.
pub const BUMP_INNER: f64 = 1.1;
/// Radius beyond which `ζ` vanishes.
pub const BUMP_OUTER: f64 = 1.9;

/// C⁴ smoothstep on `[0, 1]`.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t.powi(5) * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))))
    }
}

/// Base bump `ζ(θ)`: 1 for `|θ| ≤ 1.1`, 0 for `|θ| ≥ 1.9`.
pub fn bump(r: f64) -> f64 {
    1.0 - smoothstep((r.abs() - BUMP_INNER) / (BUMP_OUTER - BUMP_INNER))
}

/// `ζ_k(r) = ζ(2^{-k} r)` for any integer `k`.
pub fn bump_k(k: i32, r: f64) -> f64 {
    bump(r * 2f64.powi(-k))
}

/// Annulus weight `φ_k(r)`.
pub fn block_weight(k: i32, r: f64) -> f64 {
    match k {
        k if k < 0 => 0.0,
        0 => bump(r),
        k => bump_k(k, r) - bump_k(k - 1, r),
    }
}

/// Low-pass weight of `S_k`: `ζ_k` for `k ≥ 0`, zero otherwise.
pub fn low_pass_weight(k: i32, r: f64) -> f64 {
    if k < 0 {
        0.0
    } else {
        bump_k(k, r)
    }
}

/// Cutoff `ψ`: 0 for `|η| ≤ 1`, 1 for `|η| ≥ 2`.
pub fn high_pass_cutoff(r: f64) -> f64 {
    smoothstep(r.abs() - 1.0)
}

/// Closed support annulus of block `k` as `(inner, outer)` radii.
pub fn block_support(k: i32) -> Option<(f64, f64)> {
    match k {
        k if k < 0 => None,
        0 => Some((0.0, BUMP_OUTER)),
        k => Some((BUMP_INNER * 2f64.powi(k - 1), BUMP_OUTER * 2f64.powi(k))),
    }
}

/// Smallest `K` with `S_K = Id` on every mode of the grid.
pub fn max_block(grid: &GridSpec) -> i32 {
    let top = grid.max_wavenumber();
    let mut k = 0;
    while BUMP_INNER * 2f64.powi(k) < top {
        k += 1;
    }
    k
}

fn radial_spectrum(u: &SurfaceField, w: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let g = *u.grid();
    u.coeffs().iter().enumerate().map(|(i, &c)| c * w(g.xi_norm(i))).collect()
}

fn radial_filter(u: &SurfaceField, w: impl Fn(f64) -> f64) -> SurfaceField {
    SurfaceField::from_coeffs(u.grid(), &radial_spectrum(u, w)).expect("same grid")
}

/// Spectrum of `Δ_k u`, exactly zero outside [`block_support`].
pub fn dyadic_block_spectrum(u: &SurfaceField, k: i32) -> Vec<Complex64> {
    radial_spectrum(u, |r| block_weight(k, r))
}

/// `Δ_k u`.
pub fn dyadic_block(u: &SurfaceField, k: i32) -> SurfaceField {
    if k < 0 {
        return SurfaceField::zeros(u.grid());
    }
    radial_filter(u, |r| block_weight(k, r))
}

/// `S_k u = Σ_{ℓ ≤ k} Δ_ℓ u`.
pub fn low_pass(u: &SurfaceField, k: i32) -> SurfaceField {
    if k < 0 {
        return SurfaceField::zeros(u.grid());
    }
    radial_filter(u, |r| low_pass_weight(k, r))
}

/// All nonempty dyadic blocks of a field.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub blocks: Vec<(i32, SurfaceField)>,
    pub k_max: i32,
}

impl DyadicDecomposition {
    pub fn new(u: &SurfaceField) -> Self {
        let k_max = max_block(u.grid());
        let blocks = (0..=k_max).map(|k| (k, dyadic_block(u, k))).collect();
        DyadicDecomposition { blocks, k_max }
    }

    pub fn block(&self, k: i32) -> Option<&SurfaceField> {
        self.blocks.iter().find(|(j, _)| *j == k).map(|(_, b)| b)
    }

    /// `S_k` assembled from the stored blocks.
    pub fn low_pass(&self, k: i32) -> SurfaceField {
        let mut out = SurfaceField::zeros(self.blocks[0].1.grid());
        for (j, b) in &self.blocks {
            if *j <= k {
                out = &out + b;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> SurfaceField {
        self.low_pass(self.k_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.1), 1.0);
        assert_eq!(bump(1.9), 0.0);
        assert_eq!(bump(5.0), 0.0);
        let mid = bump(1.5);
        assert!((mid - 0.5).abs() < 1e-12);
        assert_eq!(high_pass_cutoff(1.0), 0.0);
        assert_eq!(high_pass_cutoff(2.0), 1.0);
    }

    #[test]
    fn mid_shell_mode_is_reproduced() {
        let g = GridSpec::new(1, 128, 9).unwrap();
        // exact powers of two lie mid-shell
        for k in 1..6 {
            let m = 2f64.powi(k);
            let u = SurfaceField::from_fn(&g, |x| (m * x[0]).sin());
            assert!((&dyadic_block(&u, k) - &u).max_abs() < 1e-14);
        }
    }

    #[test]
    fn low_pass_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GridSpec::new(1, 64, 9).unwrap();
        let u = SurfaceField::from_values(&g, (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        for k in 0..5 {
            for j in 0..5 {
                let a = low_pass(&low_pass(&u, j), k);
                let b = low_pass(&u, k.min(j));
                // ζ_k ζ_j = ζ_min(k,j) whenever k ≠ j; k = j squares the transition band
                if k != j {
                    assert!((&a - &b).max_abs() < 1e-14, "k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn negative_indices_vanish() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let u = SurfaceField::from_fn(&g, |x| 1.0 + x[0].sin());
        assert_eq!(dyadic_block(&u, -1).max_abs(), 0.0);
        assert_eq!(low_pass(&u, -2).max_abs(), 0.0);
    }
}
