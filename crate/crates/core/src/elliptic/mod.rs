//! Solvers for `∂_z² v + αΔv + β·∇∂_z v − γ ∂_z v = F₀` on the flat strip.
//!
//! [`solve_direct`] corrects with the constant-coefficient solver and is the
//! reference; [`solve_factored`] corrects with the decoupled factorization
//! `(∂_z − a)(∂_z − A)`.

mod factor;
mod flat;

pub use factor::{factorization_symbols, parabolic_march, solve_factored, FactorizationSymbols, MarchDirection};
pub use flat::solve_flat;

use crate::error::{Error, Result};
use crate::geometry::EllipticCoefficients;
use crate::spectral::{GridSpec, StripField, SurfaceField};

/// Condition at `z = -1`: `v = g` or `∂_z v = g`.
#[derive(Debug, Clone)]
pub enum BottomCondition {
    Dirichlet(SurfaceField),
    Neumann(SurfaceField),
}

impl BottomCondition {
    pub fn dirichlet_zero(grid: &GridSpec) -> Self {
        BottomCondition::Dirichlet(SurfaceField::zeros(grid))
    }

    pub fn neumann_zero(grid: &GridSpec) -> Self {
        BottomCondition::Neumann(SurfaceField::zeros(grid))
    }

    pub fn data(&self) -> &SurfaceField {
        match self {
            BottomCondition::Dirichlet(g) | BottomCondition::Neumann(g) => g,
        }
    }

    pub fn is_neumann(&self) -> bool {
        matches!(self, BottomCondition::Neumann(_))
    }

    /// Same kind with zero data.
    pub fn homogeneous(&self) -> Self {
        let z = SurfaceField::zeros(self.data().grid());
        match self {
            BottomCondition::Dirichlet(_) => BottomCondition::Dirichlet(z),
            BottomCondition::Neumann(_) => BottomCondition::Neumann(z),
        }
    }
}

/// Which backend to use for variable-coefficient solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Direct,
    Factored,
}

#[derive(Debug, Clone)]
pub struct EllipticProblem {
    pub coeffs: EllipticCoefficients,
    pub f0: StripField,
    pub top: SurfaceField,
    pub bottom: BottomCondition,
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Converged solution with the iteration record.
#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub v: StripField,
    pub iterations: usize,
    /// Relative size of the last correction.
    pub update: f64,
    /// Interior residual `‖F₀ − L v‖_{L²}` relative to `‖F₀‖ + ‖data‖`.
    pub residual: f64,
}

impl EllipticProblem {
    pub fn new(coeffs: EllipticCoefficients, f0: StripField, top: SurfaceField, bottom: BottomCondition) -> Self {
        EllipticProblem { coeffs, f0, top, bottom, tolerance: 1e-12, max_iterations: 200 }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.coeffs.grid();
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation { field: "tolerance".into(), message: "must be positive".into() });
        }
        if self.f0.grid() != g || self.top.grid() != g || self.bottom.data().grid() != g {
            return Err(Error::GridMismatch);
        }
        if !self.f0.is_finite() {
            return Err(Error::NonFinite("F0"));
        }
        self.top.ensure_finite("top data")?;
        self.bottom.data().ensure_finite("bottom data")
    }

    /// `L v = ∂_z² v + αΔv + β·∇∂_z v − γ ∂_z v`.
    pub fn apply_operator(&self, v: &StripField) -> StripField {
        apply_operator(&self.coeffs, v)
    }

    fn data_scale(&self) -> f64 {
        self.f0.l2_norm() + self.top.l2_norm() + self.bottom.data().l2_norm()
    }

    /// Interior residual relative to the data.
    pub fn residual(&self, v: &StripField) -> f64 {
        let mut r = self.f0.sub(&self.apply_operator(v));
        let top = r.nz() - 1;
        r.level_mut(0).fill(0.0);
        r.level_mut(top).fill(0.0);
        r.l2_norm() / self.data_scale().max(f64::MIN_POSITIVE)
    }

    pub fn solve(&self, backend: Backend) -> Result<EllipticSolution> {
        match backend {
            Backend::Direct => solve_direct(self),
            Backend::Factored => solve_factored(self),
        }
    }
}

pub(crate) fn apply_operator(c: &EllipticCoefficients, v: &StripField) -> StripField {
    let vz = v.dz();
    let mut out = v.dzz().add(&c.alpha.product(&v.laplacian_x())).sub(&c.gamma.product(&vz));
    for (i, b) in c.beta.iter().enumerate() {
        out = out.add(&b.product(&vz.dx(i)));
    }
    out
}

/// Shared residual-correction loop: `v ← v + θ P(F₀ − L v)` with homogeneous boundary data.
pub(crate) fn correct(
    problem: &EllipticProblem,
    mut v: StripField,
    precondition: impl Fn(&StripField) -> Result<StripField>,
) -> Result<EllipticSolution> {
    let mut damping = 1.0;
    let mut previous = f64::INFINITY;
    let mut first = None;
    for it in 1..=problem.max_iterations {
        let r = problem.f0.sub(&problem.apply_operator(&v));
        let delta = precondition(&r)?;
        let size = delta.l2_norm();
        if !size.is_finite() {
            return Err(Error::NoConvergence { iterations: it, residual: f64::INFINITY });
        }
        let first_size = *first.get_or_insert(size);
        if size > previous && damping == 1.0 {
            damping = 0.5;
        }
        if size > 1e8 * first_size.max(f64::MIN_POSITIVE) {
            return Err(Error::NoConvergence { iterations: it, residual: problem.residual(&v) });
        }
        previous = size;
        v = v.axpy(damping, &delta);
        let scale = v.l2_norm();
        if size == 0.0 || size <= problem.tolerance * scale {
            let residual = problem.residual(&v);
            return Ok(EllipticSolution { v, iterations: it, update: size / scale.max(f64::MIN_POSITIVE), residual });
        }
    }
    Err(Error::NoConvergence { iterations: problem.max_iterations, residual: problem.residual(&v) })
}

/// Residual correction with the constant-coefficient solver as preconditioner.
pub fn solve_direct(problem: &EllipticProblem) -> Result<EllipticSolution> {
    problem.validate()?;
    let v = solve_flat(&problem.f0, &problem.top, &problem.bottom);
    if problem.coeffs.is_flat() {
        let residual = problem.residual(&v);
        return Ok(EllipticSolution { v, iterations: 1, update: 0.0, residual });
    }
    let g = *problem.coeffs.grid();
    let zero = SurfaceField::zeros(&g);
    let bottom = problem.bottom.homogeneous();
    correct(problem, v, |r| Ok(solve_flat(r, &zero, &bottom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FlatteningMap;

    fn manufactured(g: &GridSpec) -> StripField {
        StripField::from_fn(g, |x, z| (x[0] + 0.3).cos() * (1.3 * z).exp() + 0.2 * (2.0 * x[0]).sin() * (z * z - 0.5))
    }

    fn problem_for(eta: &SurfaceField, exact: &StripField, neumann: bool) -> EllipticProblem {
        let map = FlatteningMap::build(eta, 0.3, None).unwrap();
        let coeffs = EllipticCoefficients::from_map(&map);
        let f0 = apply_operator(&coeffs, exact);
        let bottom = if neumann {
            BottomCondition::Neumann(exact.dz().bottom())
        } else {
            BottomCondition::Dirichlet(exact.bottom())
        };
        EllipticProblem::new(coeffs, f0, exact.top(), bottom)
    }

    #[test]
    fn flat_problem_takes_one_iteration() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let exact = manufactured(&g);
        let p = problem_for(&SurfaceField::zeros(&g), &exact, false);
        let s = solve_direct(&p).unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.v.sub(&exact).max_abs() < 1e-11);
    }

    #[test]
    fn manufactured_solution_direct() {
        let g = GridSpec::new(1, 32, 33).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
        let exact = manufactured(&g);
        for neumann in [false, true] {
            let s = solve_direct(&problem_for(&eta, &exact, neumann)).unwrap();
            assert!(s.v.sub(&exact).l2_norm() < 1e-10, "{neumann}: {}", s.v.sub(&exact).l2_norm());
        }
    }

    #[test]
    fn steep_surface_reports_no_convergence() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.6 * (3.0 * x[0]).cos());
        let exact = manufactured(&g);
        let p = problem_for(&eta, &exact, false).with_max_iterations(40);
        assert!(matches!(solve_direct(&p), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn nyquist_coupling_converges() {
        // 7 + 3·3 lands on the Nyquist mode of N = 32
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| -0.012 * (3.0 * x[0]).sin());
        let coeffs = EllipticCoefficients::from_map(&FlatteningMap::build(&eta, 0.5, None).unwrap());
        let top = SurfaceField::from_fn(&g, |x| (7.0 * x[0]).sin());
        for bottom in [BottomCondition::dirichlet_zero(&g), BottomCondition::neumann_zero(&g)] {
            let p = EllipticProblem::new(coeffs.clone(), StripField::zeros(&g), top.clone(), bottom);
            assert!(solve_direct(&p).unwrap().iterations < 60);
            assert!(solve_factored(&p).unwrap().iterations < 60);
        }
    }

    #[test]
    fn zero_data_zero_solution() {
        let g = GridSpec::new(1, 16, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].sin());
        let coeffs = EllipticCoefficients::from_map(&FlatteningMap::build(&eta, 0.5, None).unwrap());
        let p = EllipticProblem::new(coeffs, StripField::zeros(&g), SurfaceField::zeros(&g), BottomCondition::dirichlet_zero(&g));
        assert_eq!(solve_direct(&p).unwrap().v.max_abs(), 0.0);
        assert_eq!(solve_factored(&p).unwrap().v.max_abs(), 0.0);
    }
}
