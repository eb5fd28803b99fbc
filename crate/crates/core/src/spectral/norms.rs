//! Sobolev, Besov/Zygmund and Chemin–Lerner norms on the periodic grid.

use super::dyadic::{dyadic_block, max_block};
use super::field::SurfaceField;
use super::strip::StripField;
use crate::error::{Error, Result};

/// `‖u‖_{H^s} = (L^d Σ ⟨ξ⟩^{2s} |û(ξ)|²)^{1/2}` with `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
///
/// For `s = 0` this is the continuous `L²` norm over one period.
pub fn sobolev_norm(u: &SurfaceField, s: f64) -> Result<f64> {
    u.ensure_finite("sobolev_norm")?;
    let g = u.grid();
    let total: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = g.xi_norm(i);
            (1.0 + k * k).powf(s) * c.norm_sqr()
        })
        .sum();
    Ok((total * g.domain_measure()).sqrt())
}

fn lq_sum(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `‖u‖_{B^s_{p,q}} = ‖(2^{ks} ‖Δ_k u‖_{L^p})_k‖_{ℓ^q}`.
pub fn besov_norm(u: &SurfaceField, s: f64, p: f64, q: f64) -> Result<f64> {
    u.ensure_finite("besov_norm")?;
    check_exponent(p, "p")?;
    check_exponent(q, "q")?;
    let kmax = max_block(u.grid());
    let terms = (0..=kmax).map(|k| 2f64.powf(k as f64 * s) * dyadic_block(u, k).lp_norm(p));
    Ok(lq_sum(terms, q))
}

/// Zygmund norm `C^s = B^s_{∞,∞}`.
pub fn zygmund_norm(u: &SurfaceField, s: f64) -> Result<f64> {
    besov_norm(u, s, f64::INFINITY, f64::INFINITY)
}

/// Chemin–Lerner norm `(Σ_k 2^{ksr} ‖Δ_k w‖^r_{L^q_z(L^p_x)})^{1/r}` over `z ∈ [-1, 0]`.
pub fn chemin_lerner_norm(w: &StripField, q: f64, s: f64, p: f64, r: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(Error::NonFinite("chemin_lerner_norm"));
    }
    check_exponent(q, "q")?;
    check_exponent(p, "p")?;
    check_exponent(r, "r")?;
    let g = w.grid();
    let kmax = max_block(g);
    let zg = w.zgrid();
    // per-level spectra once, then blocks per level
    let levels: Vec<SurfaceField> = (0..w.nz()).map(|j| w.level_field(j)).collect();
    let mut terms = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let per_level: Vec<f64> = levels.iter().map(|f| dyadic_block(f, k).lp_norm(p)).collect();
        let lq = if q.is_infinite() {
            per_level.iter().copied().fold(0.0, f64::max)
        } else {
            zg.integrate(&per_level.iter().map(|v| v.powf(q)).collect::<Vec<_>>()).powf(1.0 / q)
        };
        terms.push(2f64.powf(k as f64 * s) * lq);
    }
    Ok(lq_sum(terms.into_iter(), r))
}

fn check_exponent(p: f64, name: &str) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Validation { field: name.to_string(), message: format!("exponent {p} must be >= 1") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norms() {
        let g = GridSpec::new(1, 32, 9).unwrap();
        let u = SurfaceField::zeros(&g);
        assert_eq!(sobolev_norm(&u, 1.5).unwrap(), 0.0);
        assert_eq!(besov_norm(&u, 1.0, 2.0, 2.0).unwrap(), 0.0);
        assert_eq!(zygmund_norm(&u, 0.5).unwrap(), 0.0);
        assert_eq!(chemin_lerner_norm(&StripField::zeros(&g), 2.0, 1.0, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn parseval_for_cosine() {
        let g = GridSpec::new(1, 64, 9).unwrap();
        let u = SurfaceField::from_fn(&g, |x| (4.0 * x[0]).cos());
        assert!((sobolev_norm(&u, 0.0).unwrap() - PI.sqrt()).abs() < 1e-13);
        // ⟨4⟩^{2} = 17
        assert!((sobolev_norm(&u, 1.0).unwrap() - (17.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let mut u = SurfaceField::zeros(&g);
        u.values_mut()[3] = f64::NAN;
        assert!(matches!(sobolev_norm(&u, 0.0), Err(Error::NonFinite(_))));
    }
}
