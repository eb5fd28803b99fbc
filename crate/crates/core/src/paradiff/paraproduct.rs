use crate::error::Result;
use crate::spectral::dyadic::{dyadic_block, low_pass, max_block};
use crate::spectral::SurfaceField;

/// Bony paraproduct `T_a u = Σ_k S_{k-3} a · Δ_k u` (function case, `ψ = 1`).
pub fn paraproduct(a: &SurfaceField, u: &SurfaceField) -> Result<SurfaceField> {
    a.check_grid(u)?;
    let kmax = max_block(u.grid());
    let mut out = SurfaceField::zeros(u.grid());
    for k in 3..=kmax {
        let low = low_pass(a, k - 3);
        let block = dyadic_block(u, k);
        out = &out + &low.product(&block);
    }
    Ok(out)
}

/// High–high remainder `R(u, a) = Σ_{|k-ℓ| ≤ 2} Δ_k a · Δ_ℓ u`.
pub fn bony_remainder(u: &SurfaceField, a: &SurfaceField) -> Result<SurfaceField> {
    a.check_grid(u)?;
    let kmax = max_block(u.grid());
    let ab: Vec<SurfaceField> = (0..=kmax).map(|k| dyadic_block(a, k)).collect();
    let ub: Vec<SurfaceField> = (0..=kmax).map(|k| dyadic_block(u, k)).collect();
    let mut out = SurfaceField::zeros(u.grid());
    for k in 0..=kmax {
        let lo = (k - 2).max(0);
        let hi = (k + 2).min(kmax);
        let mut near = SurfaceField::zeros(u.grid());
        for l in lo..=hi {
            near = &near + &ub[l as usize];
        }
        out = &out + &ab[k as usize].product(&near);
    }
    Ok(out)
}

/// `T_V · ∇u = Σ_i T_{V_i} ∂_i u`.
pub fn paraproduct_advection(v: &[SurfaceField], u: &SurfaceField) -> Result<SurfaceField> {
    let mut out = SurfaceField::zeros(u.grid());
    for (axis, vi) in v.iter().enumerate() {
        out = &out + &paraproduct(vi, &u.derivative(axis))?;
    }
    Ok(out)
}
