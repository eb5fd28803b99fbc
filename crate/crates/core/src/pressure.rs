//! Pressure `−ΔP = ∂_i v^j ∂_j v^i` with `P = 0` on the surface and
//! `∂_y P = −1` on the bottom, and the Taylor coefficient `a = −∂_y P|_{y=η}`.

use crate::dn::SolverSettings;
use crate::elliptic::{BottomCondition, EllipticProblem};
use crate::error::Result;
use crate::geometry::{EllipticCoefficients, FlatteningMap};
use crate::spectral::{StripField, SurfaceField};

#[derive(Debug, Clone)]
pub struct PressureResult {
    pub p_tilde: StripField,
    pub taylor_a: SurfaceField,
    /// Horizontal gradient of `P` on `y = -1`.
    pub bottom_grad: Vec<SurfaceField>,
    /// Relative interior residual of the strip solve.
    pub residual: f64,
}

/// `Σ_{i,j} ∂_i v^j ∂_j v^i` from the physical velocity gradient `grad[j][i] = ∂_i v^j`.
pub fn velocity_gradient_contraction(grad: &[Vec<StripField>]) -> StripField {
    let n = grad.len();
    let mut s = StripField::zeros(grad[0][0].grid());
    for i in 0..n {
        for j in 0..n {
            s = s.add(&grad[j][i].dealiased_product(&grad[i][j]));
        }
    }
    s
}

/// Solve for `P̃₁ = P̃ + ρ`, which has surface data `η` and a homogeneous
/// Neumann bottom, then recover `P̃`, `a` and `∇P|_{y=-1}`.
pub fn solve_pressure(
    map: &FlatteningMap,
    coeffs: &EllipticCoefficients,
    velocity: &[StripField],
    settings: &SolverSettings,
) -> Result<PressureResult> {
    let g = *map.grid();
    let grad: Vec<Vec<StripField>> = velocity.iter().map(|v| map.physical_gradient(v)).collect();
    let source = velocity_gradient_contraction(&grad);
    // α·(ΔP)~ with ΔP = −Σ ∂_i v^j ∂_j v^i
    let f0 = coeffs.alpha.product(&source).scale(-1.0);
    let problem = EllipticProblem::new(coeffs.clone(), f0, map.eta().clone(), BottomCondition::neumann_zero(&g))
        .with_tolerance(settings.tolerance)
        .with_max_iterations(settings.max_iterations);
    let sol = problem.solve(settings.backend)?;
    let p1 = sol.v;
    let top = g.nz - 1;
    let dz_top = p1.dz().level_field(top);
    let taylor_a = dz_top.zip_map(&map.dz_rho().level_field(top), |p, d| 1.0 - p / d);
    let bottom = p1.bottom();
    let bottom_grad = bottom.gradient();
    Ok(PressureResult { p_tilde: p1.sub(map.rho()), taylor_a, bottom_grad, residual: sol.residual })
}

/// Minimum of `a` and whether it falls below `c₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorSign {
    pub min: f64,
    pub violated: bool,
}

pub fn taylor_sign_check(pr: &PressureResult, c0: f64) -> TaylorSign {
    let min = pr.taylor_a.min();
    TaylorSign { min, violated: min < c0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn rest(eta: &SurfaceField) -> PressureResult {
        let map = FlatteningMap::build(eta, 0.5, None).unwrap();
        let coeffs = EllipticCoefficients::from_map(&map);
        let g = *eta.grid();
        let v = vec![StripField::zeros(&g); g.dim + 1];
        solve_pressure(&map, &coeffs, &v, &SolverSettings::default()).unwrap()
    }

    #[test]
    fn hydrostatic_rest() {
        let g = GridSpec::new(1, 16, 17).unwrap();
        let pr = rest(&SurfaceField::zeros(&g));
        let y = StripField::from_fn(&g, |_, z| -z);
        assert!(pr.p_tilde.sub(&y).max_abs() < 1e-14);
        assert!(pr.taylor_a.values().iter().all(|&a| (a - 1.0).abs() < 1e-12));
        assert!(pr.bottom_grad[0].max_abs() < 1e-14);
        assert_eq!(pr.p_tilde.top().max_abs(), 0.0);
        let ts = taylor_sign_check(&pr, 1.0);
        assert!(!ts.violated);
        assert!(taylor_sign_check(&pr, 2.0).violated);
    }

    #[test]
    fn constant_surface_is_hydrostatic() {
        let g = GridSpec::new(1, 16, 17).unwrap();
        let pr = rest(&SurfaceField::constant(&g, 0.2));
        assert!(pr.taylor_a.values().iter().all(|&a| (a - 1.0).abs() < 1e-10));
    }

    #[test]
    fn uniform_stream_is_hydrostatic() {
        let g = GridSpec::new(1, 16, 17).unwrap();
        let map = FlatteningMap::build(&SurfaceField::zeros(&g), 0.5, None).unwrap();
        let coeffs = EllipticCoefficients::from_map(&map);
        let v = vec![StripField::zeros(&g).map(|_| 0.8), StripField::zeros(&g)];
        let pr = solve_pressure(&map, &coeffs, &v, &SolverSettings::default()).unwrap();
        assert!(pr.taylor_a.values().iter().all(|&a| (a - 1.0).abs() < 1e-12));
    }
}
