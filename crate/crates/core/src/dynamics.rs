//! Evolution of `(η, V, B, V_b, ω̃)`: velocity recovery from vorticity and
//! surface traces, the pressure solve, right-hand-side assembly and RK4.

use crate::dn::SolverSettings;
use crate::elliptic::{BottomCondition, EllipticProblem};
use crate::error::{Error, Result};
use crate::geometry::{transport_velocity, EllipticCoefficients, FlatteningMap};
use crate::pressure::{solve_pressure, PressureResult};
use crate::spectral::{GridSpec, StripField, SurfaceField};

/// Index pairs `(i, j)`, `i < j`, of the stored vorticity components.
/// The vertical direction is index `d`.
pub fn vorticity_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=dim {
        for j in i + 1..=dim {
            out.push((i, j));
        }
    }
    out
}

/// Storage slot and sign of `ω_{ij}`; `None` on the diagonal.
fn slot(dim: usize, i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    vorticity_pairs(dim).iter().position(|&p| p == (lo, hi)).map(|p| (p, sign))
}

#[derive(Debug, Clone)]
pub struct WaveState {
    pub t: f64,
    pub eta: SurfaceField,
    /// Horizontal velocity on the surface.
    pub v: Vec<SurfaceField>,
    /// Vertical velocity on the surface.
    pub b: SurfaceField,
    /// Horizontal velocity on the bottom.
    pub vb: Vec<SurfaceField>,
    /// Flattened vorticity, one field per pair of [`vorticity_pairs`].
    pub omega: Vec<StripField>,
}

impl WaveState {
    pub fn rest(grid: &GridSpec) -> Self {
        let z = SurfaceField::zeros(grid);
        WaveState {
            t: 0.0,
            eta: z.clone(),
            v: vec![z.clone(); grid.dim],
            b: z.clone(),
            vb: vec![z; grid.dim],
            omega: vec![StripField::zeros(grid); vorticity_pairs(grid.dim).len()],
        }
    }

    /// `η = A cos(k x₁)` with the fluid at rest.
    pub fn standing_wave(grid: &GridSpec, amplitude: f64, mode: usize) -> Self {
        let mut s = Self::rest(grid);
        let k = mode as f64 * grid.dk();
        s.eta = SurfaceField::from_fn(grid, |x| amplitude * (k * x[0]).cos());
        s
    }

    /// Uniform horizontal stream `v = (c, 0)`.
    /// Flat surface carrying the traces of the potential `c cos(kx) cosh(k(y+1))/cosh k`.
    pub fn potential_mode(grid: &GridSpec, mode: usize, c: f64) -> Self {
        let mut s = Self::rest(grid);
        let k = mode as f64 * grid.dk();
        s.v[0] = SurfaceField::from_fn(grid, |x| -c * k * (k * x[0]).sin());
        s.b = SurfaceField::from_fn(grid, |x| c * k * k.tanh() * (k * x[0]).cos());
        s.vb[0] = SurfaceField::from_fn(grid, |x| -c * k * (k * x[0]).sin() / k.cosh());
        s
    }

    pub fn stream(grid: &GridSpec, c: f64) -> Self {
        let mut s = Self::rest(grid);
        s.v[0] = SurfaceField::constant(grid, c);
        s.vb[0] = SurfaceField::constant(grid, c);
        s
    }

    /// Flat-surface shear `v¹ = ω₀ (y + 1)`, so that `ω₁,_{d+1} = −ω₀`.
    pub fn shear(grid: &GridSpec, omega0: f64) -> Self {
        let mut s = Self::rest(grid);
        s.v[0] = SurfaceField::constant(grid, omega0);
        let (p, sign) = slot(grid.dim, 0, grid.dim).expect("off-diagonal");
        s.omega[p] = StripField::zeros(grid).map(|_| -sign * omega0);
        s
    }

    pub fn grid(&self) -> &GridSpec {
        self.eta.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim
    }

    /// `ω_{ij}` as a strip field.
    pub fn omega_ij(&self, i: usize, j: usize) -> StripField {
        match slot(self.dim(), i, j) {
            Some((p, s)) => self.omega[p].scale(s),
            None => StripField::zeros(self.grid()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.eta.is_finite()
            && self.b.is_finite()
            && self.v.iter().chain(&self.vb).all(SurfaceField::is_finite)
            && self.omega.iter().all(StripField::is_finite)
    }

    /// `self + c · d` with time advanced by `c`.
    pub fn axpy(&self, c: f64, d: &StateDerivative) -> WaveState {
        let surf = |a: &SurfaceField, b: &SurfaceField| a.zip_map(b, |x, y| x + c * y);
        WaveState {
            t: self.t + c,
            eta: surf(&self.eta, &d.d_eta),
            v: self.v.iter().zip(&d.d_v).map(|(a, b)| surf(a, b)).collect(),
            b: surf(&self.b, &d.d_b),
            vb: self.vb.iter().zip(&d.d_vb).map(|(a, b)| surf(a, b)).collect(),
            omega: self.omega.iter().zip(&d.d_omega).map(|(a, b)| a.axpy(c, b)).collect(),
        }
    }

    /// Apply `exp(−36 (|ξ|/ξ_max)^36)` to every field.
    pub fn filtered(&self) -> WaveState {
        let g = *self.grid();
        let kmax = g.max_wavenumber();
        let m = move |xi: [f64; 2]| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt() / kmax;
            (-36.0 * r.powi(36)).exp()
        };
        let f = |s: &SurfaceField| s.apply_multiplier(m);
        WaveState {
            t: self.t,
            eta: f(&self.eta),
            v: self.v.iter().map(f).collect(),
            b: f(&self.b),
            vb: self.vb.iter().map(f).collect(),
            omega: self.omega.iter().map(|w| w.map_levels(f)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateDerivative {
    pub d_eta: SurfaceField,
    pub d_v: Vec<SurfaceField>,
    pub d_b: SurfaceField,
    pub d_vb: Vec<SurfaceField>,
    pub d_omega: Vec<StripField>,
}

impl StateDerivative {
    pub fn is_finite(&self) -> bool {
        self.d_eta.is_finite()
            && self.d_b.is_finite()
            && self.d_v.iter().chain(&self.d_vb).all(SurfaceField::is_finite)
            && self.d_omega.iter().all(StripField::is_finite)
    }

    /// Largest absolute entry over all components.
    pub fn max_abs(&self) -> f64 {
        let mut m = self.d_eta.max_abs().max(self.d_b.max_abs());
        for f in self.d_v.iter().chain(&self.d_vb) {
            m = m.max(f.max_abs());
        }
        for w in &self.d_omega {
            m = m.max(w.max_abs());
        }
        m
    }
}

/// Physical and numerical parameters of the evolution.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    /// Depth threshold: steps with `min(1 + η) < h₀/2` are rejected.
    pub h0: f64,
    /// Smoothing parameter of the map; `None` picks it adaptively on each call.
    pub delta: Option<f64>,
    pub settings: SolverSettings,
    pub cfl_safety: f64,
    pub filter: bool,
}

impl Default for Model {
    fn default() -> Self {
        Model { h0: 0.5, delta: None, settings: SolverSettings::default(), cfl_safety: 0.5, filter: true }
    }
}

impl Model {
    pub fn flattening(&self, eta: &SurfaceField) -> Result<FlatteningMap> {
        let min_depth = 1.0 + eta.min();
        if !(min_depth >= 0.5 * self.h0) {
            return Err(Error::DepthViolation { min_depth, floor: 0.5 * self.h0 });
        }
        FlatteningMap::build(eta, 0.5 * self.h0, self.delta)
    }

    /// Fix `δ` to the value chosen for `eta`, so that `ω̃` keeps one coordinate system.
    pub fn freeze_delta(mut self, eta: &SurfaceField) -> Result<Self> {
        self.delta = Some(self.flattening(eta)?.delta());
        Ok(self)
    }

    /// `cfl_safety / √(max a · k_max)`.
    pub fn time_step(&self, a_max: f64, grid: &GridSpec) -> f64 {
        self.cfl_safety / (a_max.max(1e-3) * grid.max_wavenumber()).sqrt()
    }

    fn solve(&self, coeffs: &EllipticCoefficients, f0: StripField, top: SurfaceField, bottom: BottomCondition) -> Result<StripField> {
        let p = EllipticProblem::new(coeffs.clone(), f0, top, bottom)
            .with_tolerance(self.settings.tolerance)
            .with_max_iterations(self.settings.max_iterations);
        Ok(p.solve(self.settings.backend)?.v)
    }
}

/// Recovered velocity with the monitored constraint residuals.
#[derive(Debug, Clone)]
pub struct Velocity {
    /// `(ṽ¹, …, ṽ^{d+1})`.
    pub v: Vec<StripField>,
    /// `‖div v‖_{L²}` on the strip.
    pub div_residual: f64,
    /// `‖∇×v − ω‖_{L²}` on the strip.
    pub curl_residual: f64,
}

/// `α (−Σ_j ∂_j ω_{ij})~` for each component `i`.
pub fn vorticity_source(state: &WaveState, map: &FlatteningMap, coeffs: &EllipticCoefficients) -> Vec<StripField> {
    let d = state.dim();
    let g = *state.grid();
    let grads: Vec<Vec<StripField>> = state.omega.iter().map(|w| map.physical_gradient(w)).collect();
    (0..=d)
        .map(|i| {
            let mut s = StripField::zeros(&g);
            for j in 0..=d {
                if let Some((p, sign)) = slot(d, i, j) {
                    s = s.axpy(-sign, &grads[p][j]);
                }
            }
            coeffs.alpha.product(&s)
        })
        .collect()
}

fn top_traces(state: &WaveState) -> Vec<SurfaceField> {
    let mut out = state.v.clone();
    out.push(state.b.clone());
    out
}

fn bottom_traces(state: &WaveState) -> Vec<BottomCondition> {
    let g = state.grid();
    let mut out: Vec<BottomCondition> = state.vb.iter().map(|f| BottomCondition::Dirichlet(f.clone())).collect();
    out.push(BottomCondition::dirichlet_zero(g));
    out
}

/// Divergence and curl mismatch of a velocity field.
pub fn constraint_residuals(state: &WaveState, map: &FlatteningMap, v: &[StripField]) -> (f64, f64) {
    let d = state.dim();
    let grads: Vec<Vec<StripField>> = v.iter().map(|c| map.physical_gradient(c)).collect();
    let mut div = StripField::zeros(state.grid());
    for (i, gi) in grads.iter().enumerate() {
        div = div.add(&gi[i]);
    }
    let mut curl = 0.0;
    for (p, &(i, j)) in vorticity_pairs(d).iter().enumerate() {
        let w = grads[j][i].sub(&grads[i][j]).sub(&state.omega[p]);
        curl += w.inner(&w);
    }
    (div.l2_norm(), curl.sqrt())
}

/// Solve `Δv = −∇×ω` with `v = (V, B)` on top and `(V_b, 0)` on the bottom.
pub fn recover_velocity(model: &Model, state: &WaveState, map: &FlatteningMap, coeffs: &EllipticCoefficients) -> Result<Velocity> {
    let src = vorticity_source(state, map, coeffs);
    let v = src
        .into_iter()
        .zip(top_traces(state))
        .zip(bottom_traces(state))
        .map(|((f0, top), bottom)| model.solve(coeffs, f0, top, bottom))
        .collect::<Result<Vec<_>>>()?;
    let (div_residual, curl_residual) = constraint_residuals(state, map, &v);
    Ok(Velocity { v, div_residual, curl_residual })
}

/// `(v_ir, v_ω)`: harmonic part carrying the surface traces and the
/// vorticity-driven part carrying the bottom traces.
pub fn rotational_split(
    model: &Model,
    state: &WaveState,
    map: &FlatteningMap,
    coeffs: &EllipticCoefficients,
) -> Result<(Vec<StripField>, Vec<StripField>)> {
    let g = *state.grid();
    let src = vorticity_source(state, map, coeffs);
    let mut v_ir = Vec::new();
    let mut v_om = Vec::new();
    for ((f0, top), bottom) in src.into_iter().zip(top_traces(state)).zip(bottom_traces(state)) {
        v_ir.push(model.solve(coeffs, StripField::zeros(&g), top, BottomCondition::dirichlet_zero(&g))?);
        v_om.push(model.solve(coeffs, f0, SurfaceField::zeros(&g), bottom)?);
    }
    Ok((v_ir, v_om))
}

/// Normal-derivative trace `∂_y w − ∇η·∇_x w` at `y = η` of each component.
pub fn surface_normal_traces(map: &FlatteningMap, w: &[StripField]) -> Vec<SurfaceField> {
    let d = map.grid().dim;
    let top = map.grid().nz - 1;
    let zeta = map.eta().gradient();
    w.iter()
        .map(|c| {
            let gr = map.physical_gradient(c);
            let mut out = gr[d].level_field(top);
            for (j, z) in zeta.iter().enumerate() {
                out = &out - &z.product(&gr[j].level_field(top));
            }
            out
        })
        .collect()
}

/// `R_ω^i` from the vorticity-driven velocity `v_ω`.
pub fn compute_r_omega(state: &WaveState, map: &FlatteningMap, v_om: &[StripField]) -> Vec<SurfaceField> {
    let d = state.dim();
    let top = map.grid().nz - 1;
    let zeta = state.eta.gradient();
    let n = surface_normal_traces(map, v_om);
    let w = |i: usize, j: usize| state.omega_ij(i, j).level_field(top);
    (0..d)
        .map(|i| {
            let mut r = &n[i] + &zeta[i].product(&n[d]);
            r = &r + &w(i, d);
            for j in 0..d {
                r = &r - &zeta[j].product(&w(i, j));
                r = &r + &zeta[i].product(&zeta[j]).product(&w(j, d));
            }
            r
        })
        .collect()
}

/// Everything computed while assembling the right-hand side of a state.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub derivative: StateDerivative,
    pub map: FlatteningMap,
    pub coeffs: EllipticCoefficients,
    pub velocity: Velocity,
    pub pressure: PressureResult,
}

fn advect(v: &[SurfaceField], u: &SurfaceField) -> SurfaceField {
    let mut out = SurfaceField::zeros(u.grid());
    for (i, vi) in v.iter().enumerate() {
        out = &out + &vi.dealiased_product(&u.derivative(i));
    }
    out
}

/// Time derivative of every evolved field.
pub fn assemble_rhs(model: &Model, state: &WaveState) -> Result<Evaluation> {
    let d = state.dim();
    let g = *state.grid();
    let map = model.flattening(&state.eta)?;
    let coeffs = EllipticCoefficients::from_map(&map);
    let velocity = recover_velocity(model, state, &map, &coeffs)?;
    let pressure = solve_pressure(&map, &coeffs, &velocity.v, &model.settings)?;
    let a = &pressure.taylor_a;
    let zeta = state.eta.gradient();

    let d_eta = &state.b - &advect(&state.v, &state.eta);
    let d_b = &a.map(|x| x - 1.0) - &advect(&state.v, &state.b);
    let d_v = (0..d)
        .map(|i| &(-&advect(&state.v, &state.v[i])) - &a.dealiased_product(&zeta[i]))
        .collect();
    let d_vb = (0..d)
        .map(|i| &(-&advect(&state.vb, &state.vb[i])) - &pressure.bottom_grad[i])
        .collect();

    let d_omega = if state.omega.iter().all(|w| w.max_abs() == 0.0) {
        vec![StripField::zeros(&g); state.omega.len()]
    } else {
        let moving = map.clone().with_time_derivative(&d_eta);
        let vbar = transport_velocity(&velocity.v, &moving)?;
        let grads: Vec<Vec<StripField>> = if d > 1 {
            velocity.v.iter().map(|c| map.physical_gradient(c)).collect()
        } else {
            Vec::new()
        };
        vorticity_pairs(d)
            .iter()
            .enumerate()
            .map(|(p, &(i, j))| {
                let w = &state.omega[p];
                let mut out = vbar[d].product(&w.dz()).scale(-1.0);
                for (k, vk) in vbar[..d].iter().enumerate() {
                    out = out.sub(&vk.dealiased_product(&w.dx(k)));
                }
                if d > 1 {
                    // ω_{ki} ∂_j v^k − ω_{kj} ∂_i v^k
                    for k in 0..=d {
                        out = out
                            .add(&state.omega_ij(k, i).dealiased_product(&grads[k][j]))
                            .sub(&state.omega_ij(k, j).dealiased_product(&grads[k][i]));
                    }
                }
                out
            })
            .collect()
    };
    let derivative = StateDerivative { d_eta, d_v, d_b, d_vb, d_omega };
    if !derivative.is_finite() {
        return Err(Error::NonFinite("state derivative"));
    }
    Ok(Evaluation { derivative, map, coeffs, velocity, pressure })
}

/// Classical RK4 step, reusing `first` as the first stage when given.
pub fn rk4_step(model: &Model, state: &WaveState, dt: f64, first: Option<&StateDerivative>) -> Result<WaveState> {
    let k1 = match first {
        Some(k) => k.clone(),
        None => assemble_rhs(model, state)?.derivative,
    };
    let k2 = assemble_rhs(model, &state.axpy(0.5 * dt, &k1))?.derivative;
    let k3 = assemble_rhs(model, &state.axpy(0.5 * dt, &k2))?.derivative;
    let k4 = assemble_rhs(model, &state.axpy(dt, &k3))?.derivative;
    let next = state
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4);
    let mut next = if model.filter { next.filtered() } else { next };
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    Ok(next)
}

/// Time stepping policy for [`run`].
#[derive(Debug, Clone, Copy)]
pub enum StepSize {
    /// `cfl_safety / √(max a · k_max)` recomputed every step.
    Cfl,
    Fixed(f64),
}

/// Result of a run: the last accepted state and the reason it stopped early, if any.
#[derive(Debug)]
pub struct RunOutcome {
    pub last: WaveState,
    pub steps: usize,
    pub abort: Option<Error>,
}

/// Advance to `t_final`, calling `observe` on every accepted state (including
/// the initial and final ones) with its evaluation and the step that produced it.
pub fn run(
    model: &Model,
    initial: WaveState,
    t_final: f64,
    step: StepSize,
    mut observe: impl FnMut(&WaveState, &Evaluation, Option<f64>),
) -> RunOutcome {
    let mut state = initial;
    let mut steps = 0;
    let mut last_dt = None;
    loop {
        let eval = match assemble_rhs(model, &state) {
            Ok(e) => e,
            Err(e) => return RunOutcome { last: state, steps, abort: Some(e) },
        };
        observe(&state, &eval, last_dt);
        let remaining = t_final - state.t;
        if remaining <= 1e-12 * t_final.abs().max(1.0) {
            return RunOutcome { last: state, steps, abort: None };
        }
        let dt = match step {
            StepSize::Cfl => model.time_step(eval.pressure.taylor_a.max(), state.grid()),
            StepSize::Fixed(dt) => dt,
        };
        // split the tail evenly instead of taking a sliver step
        let dt = if remaining <= dt * (1.0 + 1e-9) {
            remaining
        } else if remaining < 2.0 * dt {
            0.5 * remaining
        } else {
            dt
        };
        match rk4_step(model, &state, dt, Some(&eval.derivative)) {
            Ok(next) => {
                state = next;
                steps += 1;
                last_dt = Some(dt);
            }
            Err(e) => return RunOutcome { last: state, steps, abort: Some(e) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(1, 32, 17).unwrap()
    }

    #[test]
    fn pairs() {
        assert_eq!(vorticity_pairs(1), vec![(0, 1)]);
        assert_eq!(vorticity_pairs(2), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(slot(2, 2, 0), Some((1, -1.0)));
    }

    #[test]
    fn rest_is_fixed_point() {
        let s = WaveState::rest(&grid());
        let e = assemble_rhs(&Model::default(), &s).unwrap();
        assert!(e.derivative.max_abs() < 1e-12);
        assert!(e.velocity.v.iter().all(|c| c.max_abs() == 0.0));
        let next = rk4_step(&Model::default(), &s, 0.3, None).unwrap();
        assert_eq!(next.eta.max_abs(), 0.0);
        assert_eq!(next.t, 0.3);
    }

    #[test]
    fn stream_is_fixed_point() {
        let s = WaveState::stream(&grid(), 0.7);
        let e = assemble_rhs(&Model::default(), &s).unwrap();
        assert!(e.derivative.max_abs() < 1e-12, "{}", e.derivative.max_abs());
    }

    #[test]
    fn shear_is_recovered_and_steady() {
        let g = grid();
        let s = WaveState::shear(&g, 0.4);
        let model = Model::default();
        let e = assemble_rhs(&model, &s).unwrap();
        let exact = StripField::from_fn(&g, |_, z| 0.4 * (z + 1.0));
        assert!(e.velocity.v[0].sub(&exact).max_abs() < 1e-12);
        assert!(e.velocity.v[1].max_abs() < 1e-12);
        assert!(e.velocity.curl_residual < 1e-11);
        assert!(e.derivative.max_abs() < 1e-11);
        let next = rk4_step(&model, &s, 0.05, None).unwrap();
        assert!((&next.v[0] - &s.v[0]).max_abs() < 1e-10);
    }

    #[test]
    fn shear_r_omega_matches_hand_value() {
        // v_ω has zero traces and Δv_ω = −∇×ω = 0, so R_ω = ω₁₂ = −ω₀
        let g = grid();
        let s = WaveState::shear(&g, 0.4);
        let model = Model::default();
        let map = model.flattening(&s.eta).unwrap();
        let coeffs = EllipticCoefficients::from_map(&map);
        let (v_ir, v_om) = rotational_split(&model, &s, &map, &coeffs).unwrap();
        assert!(v_om.iter().all(|c| c.max_abs() < 1e-13));
        assert!(v_ir[0].sub(&StripField::from_fn(&g, |_, z| 0.4 * (z + 1.0))).max_abs() < 1e-12);
        let r = compute_r_omega(&s, &map, &v_om);
        assert!(r[0].values().iter().all(|&x| (x + 0.4).abs() < 1e-12));
    }

    #[test]
    fn split_adds_up() {
        let g = grid();
        let mut s = WaveState::standing_wave(&g, 0.05, 1);
        s.v[0] = SurfaceField::from_fn(&g, |x| 0.1 * x[0].sin());
        s.b = SurfaceField::from_fn(&g, |x| 0.05 * x[0].cos());
        s.vb[0] = SurfaceField::from_fn(&g, |x| 0.02 * (2.0 * x[0]).sin());
        s.omega[0] = StripField::from_fn(&g, |x, z| 0.1 * x[0].cos() * (1.0 + z));
        let model = Model::default();
        let map = model.flattening(&s.eta).unwrap();
        let coeffs = EllipticCoefficients::from_map(&map);
        let v = recover_velocity(&model, &s, &map, &coeffs).unwrap();
        let (a, b) = rotational_split(&model, &s, &map, &coeffs).unwrap();
        for i in 0..2 {
            assert!(a[i].add(&b[i]).sub(&v.v[i]).l2_norm() < 3e-12 * v.v[i].l2_norm().max(1.0));
        }
        let top = g.nz - 1;
        assert!((&v.v[0].level_field(top) - &s.v[0]).max_abs() < 1e-14);
        assert!((&v.v[0].level_field(0) - &s.vb[0]).max_abs() < 1e-14);
        assert!(v.v[1].level_field(0).max_abs() < 1e-14);
    }

    #[test]
    fn linear_wave_initial_tendency() {
        // at rest with η = ε cos x: ∂_t B = a − 1 ≈ −tanh(1) η
        let g = GridSpec::new(1, 32, 33).unwrap();
        let eps = 1e-4;
        let s = WaveState::standing_wave(&g, eps, 1);
        let e = assemble_rhs(&Model::default(), &s).unwrap();
        let expected = s.eta.scale(-1f64.tanh());
        assert!((&e.derivative.d_b - &expected).max_abs() < 10.0 * eps * eps);
        assert!(e.derivative.d_eta.max_abs() == 0.0);
    }

    #[test]
    fn depth_violation_is_reported() {
        let g = grid();
        let s = WaveState::standing_wave(&g, 0.8, 1);
        let model = Model { h0: 0.5, ..Model::default() };
        assert!(matches!(assemble_rhs(&model, &s), Err(Error::DepthViolation { .. })));
    }

    #[test]
    fn run_reaches_final_time() {
        let g = grid();
        let mut times = Vec::new();
        let out = run(&Model::default(), WaveState::rest(&g), 1.0, StepSize::Fixed(0.3), |s, _, _| times.push(s.t));
        assert!(out.abort.is_none());
        assert_eq!(out.steps, 4);
        assert!((out.last.t - 1.0).abs() < 1e-14);
        assert_eq!(times.len(), 5);
    }
}
