//! Dirichlet–Neumann operator `G(η)`, its symbol `λ` and the remainder
//! `R(η)f = G(η)f − T_λ f`.

use num_complex::Complex64;

use crate::elliptic::{Backend, BottomCondition, EllipticProblem};
use crate::error::{Error, Result};
use crate::geometry::{EllipticCoefficients, FlatteningMap};
use crate::paradiff::{loglog_slope, paradiff_apply, SymbolField};
use crate::spectral::{StripField, SurfaceField};

/// Bottom condition of the harmonic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnBottom {
    /// `φ = 0` on `y = -1`.
    Dirichlet0,
    /// `∂_y φ = 0` on `y = -1` (the physical DN operator).
    Neumann0,
}

impl DnBottom {
    fn condition(self, grid: &crate::spectral::GridSpec) -> BottomCondition {
        match self {
            DnBottom::Dirichlet0 => BottomCondition::dirichlet_zero(grid),
            DnBottom::Neumann0 => BottomCondition::neumann_zero(grid),
        }
    }
}

/// Solver knobs shared by the DN and pressure solves.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub backend: Backend,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { backend: Backend::Direct, tolerance: 1e-12, max_iterations: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct DnResult {
    pub gf: SurfaceField,
    pub phi_tilde: StripField,
    pub lambda: SymbolField,
    pub remainder: SurfaceField,
    pub bottom: DnBottom,
}

/// `G(η)` for a fixed surface, reusable across many inputs.
#[derive(Debug, Clone)]
pub struct DirichletNeumann {
    map: FlatteningMap,
    coeffs: EllipticCoefficients,
    bottom: DnBottom,
    settings: SolverSettings,
    lambda: SymbolField,
}

impl DirichletNeumann {
    pub fn new(map: FlatteningMap, bottom: DnBottom, settings: SolverSettings) -> Result<Self> {
        let coeffs = EllipticCoefficients::from_map(&map);
        let lambda = dn_symbol(&map, &coeffs)?;
        Ok(DirichletNeumann { map, coeffs, bottom, settings, lambda })
    }

    /// Build the map with `h₀ = min(1 + η)`.
    pub fn for_surface(eta: &SurfaceField, bottom: DnBottom) -> Result<Self> {
        let h0 = 1.0 + eta.min();
        if !(h0 > 0.0) {
            return Err(Error::DepthViolation { min_depth: h0, floor: 0.0 });
        }
        Self::new(FlatteningMap::build(eta, h0, None)?, bottom, SolverSettings::default())
    }

    pub fn map(&self) -> &FlatteningMap {
        &self.map
    }

    pub fn coefficients(&self) -> &EllipticCoefficients {
        &self.coeffs
    }

    pub fn lambda(&self) -> &SymbolField {
        &self.lambda
    }

    /// Harmonic extension of `f` on the flat strip.
    pub fn extend(&self, f: &SurfaceField) -> Result<StripField> {
        let g = *self.map.grid();
        let problem = EllipticProblem::new(self.coeffs.clone(), StripField::zeros(&g), f.clone(), self.bottom.condition(&g))
            .with_tolerance(self.settings.tolerance)
            .with_max_iterations(self.settings.max_iterations);
        Ok(problem.solve(self.settings.backend)?.v)
    }

    /// `G(η)f` alone.
    pub fn apply(&self, f: &SurfaceField) -> Result<SurfaceField> {
        let phi = self.extend(f)?;
        Ok(self.trace(&phi))
    }

    /// `((1 + |∇ρ|²)/∂_zρ) ∂_z φ̃ − ∇ρ·∇φ̃` at `z = 0`.
    pub fn trace(&self, phi: &StripField) -> SurfaceField {
        let top = phi.nz() - 1;
        let zeta1 = self.map.metric().top().zip_map(&self.map.dz_rho().top(), |m, d| m / d);
        let dz = phi.dz().level_field(top);
        let mut out = zeta1.product(&dz);
        let surface = phi.level_field(top);
        for (i, gr) in self.map.grad_rho().iter().enumerate() {
            out = &out - &gr.level_field(top).product(&surface.derivative(i));
        }
        out
    }

    /// Full decomposition `G(η)f = T_λ f + R(η)f`.
    pub fn evaluate(&self, f: &SurfaceField) -> Result<DnResult> {
        let phi_tilde = self.extend(f)?;
        let gf = self.trace(&phi_tilde);
        let remainder = &gf - &paradiff_apply(&self.lambda, f)?;
        Ok(DnResult { gf, phi_tilde, lambda: self.lambda.clone(), remainder, bottom: self.bottom })
    }

    /// `(⟨Gf, g⟩, ⟨f, Gg⟩)`.
    pub fn selfadjoint_check(&self, f: &SurfaceField, g: &SurfaceField) -> Result<(f64, f64)> {
        Ok((self.apply(f)?.inner(g), f.inner(&self.apply(g)?)))
    }

    /// `⟨Gf, f⟩`.
    pub fn positivity_check(&self, f: &SurfaceField) -> Result<f64> {
        Ok(self.apply(f)?.inner(f))
    }
}

/// `G(η)f` with `h₀ = min(1 + η)` and default solver settings.
pub fn dn_apply(eta: &SurfaceField, f: &SurfaceField, bottom: DnBottom) -> Result<DnResult> {
    DirichletNeumann::for_surface(eta, bottom)?.evaluate(f)
}

/// `λ = ζ₁ A − i ζ₂·ξ` at `z = 0`, with `ζ₁ = (1 + |∇ρ|²)/∂_zρ` and `ζ₂ = ∇ρ`.
pub fn dn_symbol(map: &FlatteningMap, coeffs: &EllipticCoefficients) -> Result<SymbolField> {
    let c2 = coeffs.ellipticity();
    if !(c2 > 0.0) {
        return Err(Error::EllipticityViolation { min: c2 });
    }
    let g = *map.grid();
    let top = g.nz - 1;
    let d = g.dim;
    let zeta1 = map.metric().level_field(top).zip_map(&map.dz_rho().level_field(top), |m, dz| m / dz);
    let mut params = vec![zeta1, coeffs.alpha.level_field(top)];
    params.extend(coeffs.beta.iter().map(|b| b.level_field(top)));
    params.extend(map.grad_rho().iter().map(|r| r.level_field(top)));
    Ok(SymbolField::new(&g, 1.0, params, move |p, xi| {
        let (zeta1, alpha) = (p[0], p[1]);
        let beta = &p[2..2 + d];
        let zeta2 = &p[2 + d..2 + 2 * d];
        let bxi: f64 = beta.iter().zip(xi).map(|(b, x)| b * x).sum();
        let zxi: f64 = zeta2.iter().zip(xi).map(|(b, x)| b * x).sum();
        let k2 = xi[0] * xi[0] + xi[1] * xi[1];
        let big_a = Complex64::new(0.5 * (4.0 * alpha * k2 - bxi * bxi).max(0.0).sqrt(), -0.5 * bxi);
        zeta1 * big_a - Complex64::new(0.0, zxi)
    }))
}

/// `R(η)f = Gf − T_λ f` from a computed result.
pub fn dn_remainder(result: &DnResult, f: &SurfaceField) -> Result<SurfaceField> {
    Ok(&result.gf - &paradiff_apply(&result.lambda, f)?)
}

/// Frequency sweep of `‖G f_k‖` and `‖R f_k‖` for `f_k = cos(k x_1)`.
#[derive(Debug, Clone)]
pub struct OrderReport {
    pub wavenumbers: Vec<f64>,
    pub dn_norms: Vec<f64>,
    pub remainder_norms: Vec<f64>,
    pub dn_slope: f64,
    pub remainder_slope: f64,
}

impl OrderReport {
    /// Slopes refitted on the sub-range `k ∈ [lo, hi]`.
    pub fn slopes_between(&self, lo: f64, hi: f64) -> (f64, f64) {
        let idx: Vec<usize> = (0..self.wavenumbers.len())
            .filter(|&i| self.wavenumbers[i] >= lo && self.wavenumbers[i] <= hi)
            .collect();
        let k: Vec<f64> = idx.iter().map(|&i| self.wavenumbers[i]).collect();
        let dn: Vec<f64> = idx.iter().map(|&i| self.dn_norms[i]).collect();
        let r: Vec<f64> = idx.iter().map(|&i| self.remainder_norms[i]).collect();
        (loglog_slope(&k, &dn), loglog_slope(&k, &r))
    }

    /// Gain in derivatives: DN slope minus remainder slope.
    pub fn gain(&self) -> f64 {
        self.dn_slope - self.remainder_slope
    }
}

/// Sweep `k = k_min..=k_max` and fit log-log slopes.
pub fn remainder_order_check(op: &DirichletNeumann, wavenumbers: impl IntoIterator<Item = usize>) -> Result<OrderReport> {
    let g = *op.map().grid();
    let mut report = OrderReport {
        wavenumbers: Vec::new(),
        dn_norms: Vec::new(),
        remainder_norms: Vec::new(),
        dn_slope: f64::NAN,
        remainder_slope: f64::NAN,
    };
    for k in wavenumbers {
        let f = SurfaceField::from_fn(&g, |x| (k as f64 * x[0]).cos());
        let r = op.evaluate(&f)?;
        report.wavenumbers.push(k as f64);
        report.dn_norms.push(r.gf.l2_norm());
        report.remainder_norms.push(r.remainder.l2_norm().max(f64::MIN_POSITIVE));
    }
    report.dn_slope = loglog_slope(&report.wavenumbers, &report.dn_norms);
    report.remainder_slope = loglog_slope(&report.wavenumbers, &report.remainder_norms);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn flat_symbol_is_abs_xi() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let map = FlatteningMap::build(&SurfaceField::zeros(&g), 0.5, None).unwrap();
        let lam = dn_symbol(&map, &EllipticCoefficients::from_map(&map)).unwrap();
        assert_eq!(lam.eval(3, [7.0, 0.0]), Complex64::new(7.0, 0.0));
    }

    #[test]
    fn constant_surface_symbol_is_abs_xi() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let map = FlatteningMap::build(&SurfaceField::constant(&g, 0.4), 0.5, None).unwrap();
        let lam = dn_symbol(&map, &EllipticCoefficients::from_map(&map)).unwrap();
        assert!((lam.eval(5, [6.0, 0.0]) - Complex64::new(6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn flat_dispersion() {
        let g = GridSpec::new(1, 32, 33).unwrap();
        let flat = SurfaceField::zeros(&g);
        for k in [1usize, 3, 8] {
            let f = SurfaceField::from_fn(&g, |x| (k as f64 * x[0]).cos());
            let kf = k as f64;
            let d = dn_apply(&flat, &f, DnBottom::Dirichlet0).unwrap();
            let expected = f.scale(kf / kf.tanh());
            assert!((&d.gf - &expected).max_abs() < 1e-9 * kf);
            let n = dn_apply(&flat, &f, DnBottom::Neumann0).unwrap();
            let expected = f.scale(kf * kf.tanh());
            assert!((&n.gf - &expected).max_abs() < 1e-9 * kf);
        }
    }

    #[test]
    fn constant_has_zero_neumann_dn() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
        let r = dn_apply(&eta, &SurfaceField::constant(&g, 2.0), DnBottom::Neumann0).unwrap();
        assert!(r.gf.max_abs() < 1e-10);
    }

    #[test]
    fn decomposition_is_exact() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
        let f = SurfaceField::from_fn(&g, |x| (5.0 * x[0]).sin() + (9.0 * x[0]).cos());
        let r = dn_apply(&eta, &f, DnBottom::Dirichlet0).unwrap();
        let again = dn_remainder(&r, &f).unwrap();
        assert_eq!((&again - &r.remainder).max_abs(), 0.0);
    }
}
