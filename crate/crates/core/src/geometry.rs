//! The regularized flattening map `ρ_δ(x, z) = z + (1 + z) e^{δ z |D|} η(x)`
//! and the elliptic coefficients it induces on the flat strip.

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, StripField, SurfaceField};

const DEFAULT_DELTA: f64 = 0.5;
const MAX_HALVINGS: u32 = 20;

/// Diffeomorphism from the flat strip `T^d × [-1, 0]` onto the fluid domain.
#[derive(Debug, Clone)]
pub struct FlatteningMap {
    eta: SurfaceField,
    delta: f64,
    h0: f64,
    rho: StripField,
    dz_rho: StripField,
    dzz_rho: StripField,
    grad_rho: Vec<StripField>,
    grad_dz_rho: Vec<StripField>,
    lap_rho: StripField,
    dt_rho: Option<StripField>,
}

/// Multiplier `m(ξ)` applied to `η̂` on every level with `e^{δ z |ξ|}` and the `(1 + z)` factor optional.
fn levels(grid: &GridSpec, eta: &SurfaceField, delta: f64, with_ramp: bool, m: impl Fn([f64; 2]) -> f64) -> StripField {
    let zg = crate::spectral::ZGrid::shared(grid.nz);
    let fields = zg.nodes.iter().map(|&z| {
        let ramp = if with_ramp { 1.0 + z } else { 1.0 };
        eta.apply_multiplier(|xi| {
            let k = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            ramp * (delta * z * k).exp() * m(xi)
        })
    });
    StripField::from_levels(grid, fields).expect("level sizes")
}

fn levels_derivative(grid: &GridSpec, eta: &SurfaceField, delta: f64, ramp: bool, axis: usize, m: impl Fn(f64) -> f64) -> StripField {
    // i ξ_axis m(|ξ|); the Nyquist mode carries no derivative
    let zg = crate::spectral::ZGrid::shared(grid.nz);
    let fields = zg.nodes.iter().map(|&z| {
        let r = if ramp { 1.0 + z } else { 1.0 };
        let smoothed = eta.apply_multiplier(|xi| {
            let k = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            r * (delta * z * k).exp() * m(k)
        });
        smoothed.derivative(axis)
    });
    StripField::from_levels(grid, fields).expect("level sizes")
}

impl FlatteningMap {
    /// Build the map; with `delta = None`, `δ` starts at `1/2` and is halved
    /// until `∂_z ρ_δ ≥ h₀/2` on the grid.
    pub fn build(eta: &SurfaceField, h0: f64, delta: Option<f64>) -> Result<Self> {
        eta.ensure_finite("eta")?;
        let min_depth = 1.0 + eta.min();
        if !(h0 > 0.0) || min_depth < h0 {
            return Err(Error::DepthViolation { min_depth, floor: h0 });
        }
        let candidates: Vec<f64> = match delta {
            Some(d) => vec![d],
            None => (0..=MAX_HALVINGS).map(|i| DEFAULT_DELTA * 0.5f64.powi(i as i32)).collect(),
        };
        let mut last_min = f64::NAN;
        for d in &candidates {
            let dz_rho = Self::dz_rho_for(eta, *d);
            last_min = dz_rho.min();
            if last_min >= h0 / 2.0 {
                return Ok(Self::assemble(eta, *d, h0, dz_rho));
            }
        }
        Err(Error::FlatteningFailure { min_dz_rho: last_min, halvings: candidates.len() - 1 })
    }

    fn dz_rho_for(eta: &SurfaceField, delta: f64) -> StripField {
        let g = eta.grid();
        let e = levels(g, eta, delta, false, |_| 1.0);
        let ed = levels(g, eta, delta, true, |xi| delta * (xi[0] * xi[0] + xi[1] * xi[1]).sqrt());
        e.add(&ed).map(|v| v + 1.0)
    }

    fn assemble(eta: &SurfaceField, delta: f64, h0: f64, dz_rho: StripField) -> Self {
        let g = *eta.grid();
        let k = |xi: [f64; 2]| (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let z = StripField::from_fn(&g, |_, z| z);
        let rho = z.add(&levels(&g, eta, delta, true, |_| 1.0));
        let dzz_rho = levels(&g, eta, delta, false, |xi| 2.0 * delta * k(xi))
            .add(&levels(&g, eta, delta, true, |xi| delta * delta * k(xi) * k(xi)));
        let grad_rho = (0..g.dim).map(|i| levels_derivative(&g, eta, delta, true, i, |_| 1.0)).collect();
        let grad_dz_rho = (0..g.dim)
            .map(|i| {
                levels_derivative(&g, eta, delta, false, i, |_| 1.0)
                    .add(&levels_derivative(&g, eta, delta, true, i, |r| delta * r))
            })
            .collect();
        let lap_rho = levels(&g, eta, delta, true, |xi| -(xi[0] * xi[0] + xi[1] * xi[1]));
        FlatteningMap { eta: eta.clone(), delta, h0, rho, dz_rho, dzz_rho, grad_rho, grad_dz_rho, lap_rho, dt_rho: None }
    }

    /// Attach `∂_t ρ_δ = (1 + z) e^{δ z |D|} ∂_t η`.
    pub fn with_time_derivative(mut self, deta: &SurfaceField) -> Self {
        self.dt_rho = Some(levels(self.eta.grid(), deta, self.delta, true, |_| 1.0));
        self
    }

    pub fn grid(&self) -> &GridSpec {
        self.eta.grid()
    }
    pub fn eta(&self) -> &SurfaceField {
        &self.eta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn h0(&self) -> f64 {
        self.h0
    }
    pub fn rho(&self) -> &StripField {
        &self.rho
    }
    pub fn dz_rho(&self) -> &StripField {
        &self.dz_rho
    }
    pub fn dzz_rho(&self) -> &StripField {
        &self.dzz_rho
    }
    pub fn grad_rho(&self) -> &[StripField] {
        &self.grad_rho
    }
    pub fn grad_dz_rho(&self) -> &[StripField] {
        &self.grad_dz_rho
    }
    pub fn lap_rho(&self) -> &StripField {
        &self.lap_rho
    }
    pub fn dt_rho(&self) -> Option<&StripField> {
        self.dt_rho.as_ref()
    }

    /// `1 + |∇ρ_δ|²`.
    pub fn metric(&self) -> StripField {
        let mut m = self.dz_rho.map(|_| 1.0);
        for g in &self.grad_rho {
            m = m.add(&g.product(g));
        }
        m
    }

    /// Physical gradient `(∂_{x_1}, …, ∂_{x_d}, ∂_y) f` of a flattened field `f̃`.
    pub fn physical_gradient(&self, f: &StripField) -> Vec<StripField> {
        let fz = f.dz();
        let fy = fz.zip_map(&self.dz_rho, |a, b| a / b);
        let mut out: Vec<StripField> = self
            .grad_rho
            .iter()
            .enumerate()
            .map(|(i, gr)| f.dx(i).sub(&gr.product(&fy)))
            .collect();
        out.push(fy);
        out
    }

    /// Interpolate the column `ix` of `f̃` at the physical height `y`.
    pub fn value_at(&self, f: &StripField, ix: usize, y: f64) -> Result<f64> {
        let z = self.depth_coordinate(ix, y)?;
        Ok(f.zgrid().interpolate(&f.column(ix), z))
    }

    /// Flattened coordinate `z` with `ρ_δ(x_ix, z) = y`.
    pub fn depth_coordinate(&self, ix: usize, y: f64) -> Result<f64> {
        let top = self.eta.values()[ix];
        let tol = 1e-13 * (1.0 + top.abs());
        if y < -1.0 - tol || y > top + tol || !y.is_finite() {
            return Err(Error::OutsideStrip { y, top });
        }
        let zg = self.rho.zgrid();
        let rho = self.rho.column(ix);
        let drho = self.dz_rho.column(ix);
        let (mut lo, mut hi) = (-1.0f64, 0.0f64);
        let mut z = -1.0 + (y + 1.0) / (1.0 + top);
        for _ in 0..60 {
            let r = zg.interpolate(&rho, z) - y;
            if r.abs() <= 1e-15 * (1.0 + y.abs()) {
                break;
            }
            if r > 0.0 {
                hi = z;
            } else {
                lo = z;
            }
            let step = z - r / zg.interpolate(&drho, z);
            z = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        }
        Ok(z.clamp(-1.0, 0.0))
    }
}

/// Samples on the physical domain at the column nodes `y_j = -1 + (1 + η(x))(1 + z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainField {
    pub values: StripField,
}

impl DomainField {
    pub fn from_fn(eta: &SurfaceField, f: impl Fn([f64; 2], f64) -> f64) -> Self {
        let g = *eta.grid();
        let mut values = StripField::zeros(&g);
        let nodes = values.zgrid().nodes.clone();
        for i in 0..g.points() {
            let depth = 1.0 + eta.values()[i];
            let x = g.coords(i);
            let col: Vec<f64> = nodes.iter().map(|&z| f(x, -1.0 + depth * (1.0 + z))).collect();
            values.set_column(i, &col);
        }
        DomainField { values }
    }
}

/// `f̃ = f ∘ Φ` sampled on the strip.
pub fn pullback(f: &DomainField, map: &FlatteningMap) -> Result<StripField> {
    let g = *map.grid();
    let zg = f.values.zgrid();
    let mut out = StripField::zeros(&g);
    for i in 0..g.points() {
        let depth = 1.0 + map.eta().values()[i];
        let col = f.values.column(i);
        let rho = map.rho().column(i);
        let mapped: Vec<f64> = rho.iter().map(|&y| zg.interpolate_on(&col, -1.0, -1.0 + depth, y)).collect();
        out.set_column(i, &mapped);
    }
    Ok(out)
}

/// Inverse of [`pullback`]: `f = f̃ ∘ Φ⁻¹` at the physical column nodes.
pub fn pushforward(f: &StripField, map: &FlatteningMap) -> Result<DomainField> {
    let g = *map.grid();
    let zg = f.zgrid();
    let mut out = StripField::zeros(&g);
    for i in 0..g.points() {
        let depth = 1.0 + map.eta().values()[i];
        let col: Result<Vec<f64>> = zg.nodes.iter().map(|&z| map.value_at(f, i, -1.0 + depth * (1.0 + z))).collect();
        out.set_column(i, &col?);
    }
    Ok(DomainField { values: out })
}

/// Coefficients of `∂_z² v + αΔv + β·∇∂_z v − γ ∂_z v`.
#[derive(Debug, Clone)]
pub struct EllipticCoefficients {
    pub alpha: StripField,
    pub beta: Vec<StripField>,
    pub gamma: StripField,
}

impl EllipticCoefficients {
    pub fn flat(grid: &GridSpec) -> Self {
        EllipticCoefficients {
            alpha: StripField::zeros(grid).map(|_| 1.0),
            beta: (0..grid.dim).map(|_| StripField::zeros(grid)).collect(),
            gamma: StripField::zeros(grid),
        }
    }

    pub fn from_map(map: &FlatteningMap) -> Self {
        let metric = map.metric();
        let dz = map.dz_rho();
        let alpha = dz.product(dz).zip_map(&metric, |a, m| a / m);
        let beta: Vec<StripField> = map
            .grad_rho()
            .iter()
            .map(|g| dz.product(g).zip_map(&metric, |a, m| -2.0 * a / m))
            .collect();
        let mut num = map.dzz_rho().add(&alpha.product(map.lap_rho()));
        for (b, gdz) in beta.iter().zip(map.grad_dz_rho()) {
            num = num.add(&b.product(gdz));
        }
        let gamma = num.zip_map(dz, |n, d| n / d);
        EllipticCoefficients { alpha, beta, gamma }
    }

    pub fn grid(&self) -> &GridSpec {
        self.alpha.grid()
    }

    /// `c₂ = min (4α − |β|²)`, so that `4α|ξ|² − (β·ξ)² ≥ c₂|ξ|²`.
    pub fn ellipticity(&self) -> f64 {
        let mut q = self.alpha.scale(4.0);
        for b in &self.beta {
            q = q.sub(&b.product(b));
        }
        q.min()
    }

    pub fn is_flat(&self) -> bool {
        self.alpha.values().iter().all(|&a| a == 1.0)
            && self.beta.iter().all(|b| b.max_abs() == 0.0)
            && self.gamma.max_abs() == 0.0
    }
}

/// Transport velocity `v̄ = (ṽ^h, (ṽ^{d+1} − ∂_tρ − ṽ^h·∇ρ)/∂_zρ)` for
/// advection in flattened coordinates.
pub fn transport_velocity(v: &[StripField], map: &FlatteningMap) -> Result<Vec<StripField>> {
    let dt = map.dt_rho().ok_or(Error::MissingTimeDerivative)?;
    let d = map.grid().dim;
    if v.len() != d + 1 {
        return Err(Error::SizeMismatch { expected: d + 1, actual: v.len() });
    }
    let mut w = v[d].sub(dt);
    for (vi, gr) in v[..d].iter().zip(map.grad_rho()) {
        w = w.sub(&vi.product(gr));
    }
    let mut out: Vec<StripField> = v[..d].to_vec();
    out.push(w.zip_map(map.dz_rho(), |a, b| a / b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(1, 32, 17).unwrap()
    }

    #[test]
    fn flat_surface_is_identity() {
        let g = grid();
        let map = FlatteningMap::build(&SurfaceField::zeros(&g), 0.5, None).unwrap();
        let z = StripField::from_fn(&g, |_, z| z);
        assert_eq!(map.rho().sub(&z).max_abs(), 0.0);
        assert_eq!(map.dz_rho().min(), 1.0);
        assert_eq!(map.grad_rho()[0].max_abs(), 0.0);
        let c = EllipticCoefficients::from_map(&map);
        assert!(c.is_flat());
    }

    #[test]
    fn boundary_values() {
        let g = grid();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos() + 0.05 * (2.0 * x[0]).sin());
        let map = FlatteningMap::build(&eta, 0.5, None).unwrap();
        assert!((&map.rho().top() - &eta).max_abs() < 1e-15);
        assert!(map.rho().bottom().values().iter().all(|&v| v == -1.0));
        assert!(map.dz_rho().min() >= 0.25);
    }

    #[test]
    fn closed_form_derivatives_match_collocation() {
        let g = grid();
        let eta = SurfaceField::from_fn(&g, |x| 0.2 * x[0].cos());
        let map = FlatteningMap::build(&eta, 0.5, None).unwrap();
        assert!(map.rho().dz().sub(map.dz_rho()).max_abs() < 1e-11);
        assert!(map.dz_rho().dz().sub(map.dzz_rho()).max_abs() < 1e-9);
        assert!(map.rho().dx(0).sub(&map.grad_rho()[0]).max_abs() < 1e-12);
        assert!(map.grad_rho()[0].dz().sub(&map.grad_dz_rho()[0]).max_abs() < 1e-10);
    }

    #[test]
    fn depth_violation() {
        let g = grid();
        let eta = SurfaceField::from_fn(&g, |x| if x[0] < 0.1 { -1.0 } else { 0.0 });
        assert!(matches!(FlatteningMap::build(&eta, 0.1, None), Err(Error::DepthViolation { .. })));
    }

    #[test]
    fn constant_surface_coefficients() {
        let g = grid();
        let c = 0.3;
        let map = FlatteningMap::build(&SurfaceField::constant(&g, c), 0.5, None).unwrap();
        let co = EllipticCoefficients::from_map(&map);
        assert!(co.alpha.values().iter().all(|&a| (a - (1.0 + c) * (1.0 + c)).abs() < 1e-14));
        assert_eq!(co.beta[0].max_abs(), 0.0);
        assert!(co.gamma.max_abs() < 1e-15);
    }

    #[test]
    fn pullback_of_height_is_rho() {
        let g = grid();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
        let map = FlatteningMap::build(&eta, 0.5, None).unwrap();
        let f = DomainField::from_fn(&eta, |_, y| y);
        let ft = pullback(&f, &map).unwrap();
        assert!(ft.sub(map.rho()).max_abs() < 1e-14);
        let back = pushforward(&ft, &map).unwrap();
        assert!(back.values.sub(&f.values).max_abs() < 1e-13);
    }

    #[test]
    fn transport_velocity_cases() {
        let g = grid();
        let map = FlatteningMap::build(&SurfaceField::zeros(&g), 0.5, None).unwrap();
        let v = vec![StripField::zeros(&g).map(|_| 0.7), StripField::zeros(&g)];
        assert!(matches!(transport_velocity(&v, &map), Err(Error::MissingTimeDerivative)));
        let map = map.with_time_derivative(&SurfaceField::zeros(&g));
        let vb = transport_velocity(&v, &map).unwrap();
        assert_eq!(vb[0].max(), 0.7);
        assert_eq!(vb[1].max_abs(), 0.0);
    }
}
