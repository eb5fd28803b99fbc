//! Energies, curvature, the break-down monitor and formulation residuals.

use std::fmt;

use crate::dn::dn_symbol;
use crate::dynamics::{compute_r_omega, rotational_split, surface_normal_traces, Evaluation, Model, WaveState};
use crate::error::{Error, Result};
use crate::geometry::FlatteningMap;
use crate::paradiff::{paradiff_apply, paraproduct, paraproduct_advection, SymbolField};
use crate::spectral::{sobolev_norm, StripField, SurfaceField};

/// One row of the diagnostics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub e_basic: f64,
    pub e_s: f64,
    pub e_symm: f64,
    pub a_min: f64,
    pub depth_min: f64,
    pub curvature_l2: f64,
    pub curvature_lp: f64,
    pub lipschitz_v: f64,
    pub zeta_residual: f64,
    pub div_residual: f64,
    pub curl_residual: f64,
    pub good_unknown_residual: f64,
    /// `‖v_factored − v_direct‖` when both backends run, NaN otherwise.
    pub backend_gap: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 14] = [
        "t",
        "E_basic",
        "E_s",
        "E_symm",
        "a_min",
        "depth_min",
        "curvature_L2",
        "curvature_Lp",
        "lipschitz_v",
        "zeta_residual",
        "div_residual",
        "curl_residual",
        "good_unknown_residual",
        "backend_gap",
    ];

    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.e_basic,
            self.e_s,
            self.e_symm,
            self.a_min,
            self.depth_min,
            self.curvature_l2,
            self.curvature_lp,
            self.lipschitz_v,
            self.zeta_residual,
            self.div_residual,
            self.curl_residual,
            self.good_unknown_residual,
            self.backend_gap,
        ]
    }

    pub fn from_values(v: &[f64]) -> Option<Self> {
        if v.len() != Self::COLUMNS.len() {
            return None;
        }
        Some(DiagnosticsRecord {
            t: v[0],
            e_basic: v[1],
            e_s: v[2],
            e_symm: v[3],
            a_min: v[4],
            depth_min: v[5],
            curvature_l2: v[6],
            curvature_lp: v[7],
            lipschitz_v: v[8],
            zeta_residual: v[9],
            div_residual: v[10],
            curl_residual: v[11],
            good_unknown_residual: v[12],
            backend_gap: v[13],
        })
    }

    pub fn column(&self, name: &str) -> Option<f64> {
        Self::COLUMNS.iter().position(|c| *c == name).map(|i| self.values()[i])
    }
}

/// `‖v‖²_{L²(Ω)} + ‖η‖²_{L²}`, the domain integral taken with the Jacobian `∂_zρ`.
pub fn basic_energy(eta: &SurfaceField, map: &FlatteningMap, v: &[StripField]) -> f64 {
    let kinetic: f64 = v.iter().map(|c| c.product(c).inner(map.dz_rho())).sum();
    kinetic + eta.inner(eta)
}

/// `H = ∇·(∇η / √(1 + |∇η|²))`.
pub fn mean_curvature(eta: &SurfaceField) -> SurfaceField {
    let grad = eta.gradient();
    let w = slope_factor(&grad);
    let mut h = SurfaceField::zeros(eta.grid());
    for (i, g) in grad.iter().enumerate() {
        h = &h + &g.zip_map(&w, |a, b| a / b).derivative(i);
    }
    h
}

fn slope_factor(grad: &[SurfaceField]) -> SurfaceField {
    let mut s = SurfaceField::constant(grad[0].grid(), 1.0);
    for g in grad {
        s = &s + &g.product(g);
    }
    s.map(f64::sqrt)
}

/// `(‖H‖_{L²}, ‖H‖_{L^p})`.
pub fn curvature_norms(h: &SurfaceField, p: f64) -> (f64, f64) {
    (h.l2_norm(), h.lp_norm(p))
}

/// `max_ℓ ‖∂_j(a_{ij} ∂_i ∂_ℓη) − ∂_ℓH‖_∞` with
/// `a_{ij} = (1 + |∇η|²)^{-3/2}((1 + |∇η|²)δ_{ij} − ∂_iη ∂_jη)`.
pub fn curvature_identity_residual(eta: &SurfaceField) -> f64 {
    let d = eta.grid().dim;
    let grad = eta.gradient();
    let w = slope_factor(&grad);
    let h = mean_curvature(eta);
    let coeff = |i: usize, j: usize| {
        let mut c = grad[i].product(&grad[j]).scale(-1.0);
        if i == j {
            c = &c + &w.product(&w);
        }
        c.zip_map(&w, |x, s| x / (s * s * s))
    };
    let mut worst: f64 = 0.0;
    for l in 0..d {
        let mut lhs = SurfaceField::zeros(eta.grid());
        for j in 0..d {
            let mut flux = SurfaceField::zeros(eta.grid());
            for (i, gi) in grad.iter().enumerate() {
                flux = &flux + &coeff(i, j).product(&gi.derivative(l));
            }
            lhs = &lhs + &flux.derivative(j);
        }
        worst = worst.max((&lhs - &h.derivative(l)).max_abs());
    }
    worst
}

/// `‖η‖_{H^{s+1/2}} + ‖ṽ‖_{H^{s+1/2}}`, the strip norm summing `‖∂_z^ℓ ṽ‖²_{H^{s+1/2−ℓ}}`
/// over `ℓ ≤ ⌈s + 1/2⌉`.
pub fn e_s(eta: &SurfaceField, v: &[StripField], s: f64) -> Result<f64> {
    let r = s + 0.5;
    let m = r.ceil() as usize;
    let mut total = 0.0;
    for c in v {
        let mut w = c.clone();
        for l in 0..=m {
            let weights = w.zgrid().weights.clone();
            for (j, q) in weights.iter().enumerate() {
                total += q * sobolev_norm(&w.level_field(j), r - l as f64)?.powi(2);
            }
            w = w.dz();
        }
    }
    Ok(sobolev_norm(eta, r)? + total.sqrt())
}

/// `‖v‖_{W^{1,∞}}`: sup of the components plus sup of the physical gradient.
pub fn lipschitz_v(map: &FlatteningMap, v: &[StripField]) -> f64 {
    let mut sup: f64 = 0.0;
    let mut grad: f64 = 0.0;
    for c in v {
        sup = sup.max(c.max_abs());
        for g in map.physical_gradient(c) {
            grad = grad.max(g.max_abs());
        }
    }
    sup + grad
}

fn dealiased_advection(v: &[SurfaceField], u: &SurfaceField) -> SurfaceField {
    let mut out = SurfaceField::zeros(u.grid());
    for (i, vi) in v.iter().enumerate() {
        out = &out + &vi.dealiased_product(&u.derivative(i));
    }
    out
}

/// `‖(∂_t + V·∇)ζ − G(η)V − ζ G(η)B − R_ω‖_{L²}`, summed over components, with
/// the Dirichlet-bottom DN operator taken from the harmonic part of the velocity.
pub fn zeta_residual(model: &Model, state: &WaveState, eval: &Evaluation) -> Result<f64> {
    let d = state.dim();
    let (v_ir, v_om) = rotational_split(model, state, &eval.map, &eval.coeffs)?;
    let g_traces = surface_normal_traces(&eval.map, &v_ir);
    let r_om = compute_r_omega(state, &eval.map, &v_om);
    let zeta = state.eta.gradient();
    let dt_zeta = eval.derivative.d_eta.gradient();
    let mut total = 0.0;
    for i in 0..d {
        let lhs = &dt_zeta[i] + &dealiased_advection(&state.v, &zeta[i]);
        let rhs = &(&g_traces[i] + &zeta[i].product(&g_traces[d])) + &r_om[i];
        total += (&lhs - &rhs).l2_norm().powi(2);
    }
    Ok(total.sqrt())
}

/// Good unknown `U = V + T_ζ B`.
pub fn good_unknown(state: &WaveState) -> Result<Vec<SurfaceField>> {
    let zeta = state.eta.gradient();
    state
        .v
        .iter()
        .zip(&zeta)
        .map(|(v, z)| Ok(v + &paraproduct(z, &state.b)?))
        .collect()
}

/// `∂_t U` from the right-hand side: `∂_t V + T_{∂_tζ} B + T_ζ ∂_t B`.
pub fn good_unknown_rate(state: &WaveState, eval: &Evaluation) -> Result<Vec<SurfaceField>> {
    let zeta = state.eta.gradient();
    let dz = eval.derivative.d_eta.gradient();
    (0..state.dim())
        .map(|i| {
            let a = paraproduct(&dz[i], &state.b)?;
            let b = paraproduct(&zeta[i], &eval.derivative.d_b)?;
            Ok(&(&eval.derivative.d_v[i] + &a) + &b)
        })
        .collect()
}

/// `‖T_{√(aλ)} U‖_{H^{s−1/2}} + ‖D_t U‖_{H^{s−1/2}}` with `D_t U = ∂_t U + T_V·∇U`.
pub fn symmetrizer_energy(state: &WaveState, eval: &Evaluation, dt_u: &[SurfaceField], s: f64) -> Result<f64> {
    let a = &eval.pressure.taylor_a;
    if !(a.min() > 0.0) {
        return Err(Error::TaylorSignViolation { a_min: a.min(), c0: 0.0 });
    }
    let lambda = dn_symbol(&eval.map, &eval.coeffs)?;
    let symbol = SymbolField::function(a).product(&lambda).sqrt();
    let u = good_unknown(state)?;
    let mut first = 0.0;
    let mut second = 0.0;
    for (ui, dui) in u.iter().zip(dt_u) {
        first += sobolev_norm(&paradiff_apply(&symbol, ui)?, s - 0.5)?.powi(2);
        let du = dui + &paraproduct_advection(&state.v, ui)?;
        second += sobolev_norm(&du, s - 0.5)?.powi(2);
    }
    Ok(first.sqrt() + second.sqrt())
}

fn average(a: &SurfaceField, b: &SurfaceField) -> SurfaceField {
    a.zip_map(b, |x, y| 0.5 * (x + y))
}

/// `‖D_tU + T_aζ − h₁ − [D_t, T_ζ]B‖_{L²}` across one step, centred at the
/// midpoint so that the time discretization error is second order.
pub fn good_unknown_residual(
    prev: &WaveState,
    prev_a: &SurfaceField,
    cur: &WaveState,
    cur_a: &SurfaceField,
    dt: f64,
) -> Result<f64> {
    let d = cur.dim();
    let a = average(prev_a, cur_a);
    let v: Vec<SurfaceField> = prev.v.iter().zip(&cur.v).map(|(x, y)| average(x, y)).collect();
    let b = average(&prev.b, &cur.b);
    let eta = average(&prev.eta, &cur.eta);
    let zeta = eta.gradient();
    let dzeta: Vec<SurfaceField> = cur
        .eta
        .gradient()
        .iter()
        .zip(prev.eta.gradient())
        .map(|(x, y)| (x - &y).scale(1.0 / dt))
        .collect();
    let u0 = good_unknown(prev)?;
    let u1 = good_unknown(cur)?;
    // (T_V − V)·∇w with the product dealiased as in the evolution
    let para_gap = |w: &SurfaceField| -> Result<SurfaceField> { Ok(&paraproduct_advection(&v, w)? - &dealiased_advection(&v, w)) };
    let gap_b = para_gap(&b)?;
    let tv_b = paraproduct_advection(&v, &b)?;
    let mut total = 0.0;
    for i in 0..d {
        let u_mid = &v[i] + &paraproduct(&zeta[i], &b)?;
        let dt_u = &(&u1[i] - &u0[i]).scale(1.0 / dt) + &paraproduct_advection(&v, &u_mid)?;
        let t_a_zeta = paraproduct(&a, &zeta[i])?;
        let r_a_zeta = &(&a.dealiased_product(&zeta[i]) - &t_a_zeta) - &paraproduct(&zeta[i], &a)?;
        let h1 = &(&para_gap(&v[i])? - &r_a_zeta) + &paraproduct(&zeta[i], &gap_b)?;
        let commutator = &(&paraproduct(&dzeta[i], &b)? + &paraproduct_advection(&v, &paraproduct(&zeta[i], &b)?)?)
            - &paraproduct(&zeta[i], &tv_b)?;
        let r = &(&(&dt_u + &t_a_zeta) - &h1) - &commutator;
        total += r.l2_norm().powi(2);
    }
    Ok(total.sqrt())
}

/// Settings of the per-step diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct MonitorSettings {
    /// Regularity index of `E_s` and `E_symm`.
    pub s: f64,
    /// Exponent of the curvature `L^p` norm.
    pub curvature_p: f64,
    /// Evaluate the `ζ` residual (two extra solves per component).
    pub zeta_residual: bool,
}

impl Default for MonitorSettings {
    fn default() -> Self {
        MonitorSettings { s: 2.5, curvature_p: 5.0, zeta_residual: true }
    }
}

/// Stateful recorder; keeps the previous accepted state for time differences.
#[derive(Debug, Clone)]
pub struct Monitor {
    pub settings: MonitorSettings,
    previous: Option<(WaveState, SurfaceField, Vec<SurfaceField>)>,
}

impl Monitor {
    pub fn new(settings: MonitorSettings) -> Self {
        Monitor { settings, previous: None }
    }

    /// Diagnostics of an accepted state; `dt` is the step that produced it.
    pub fn record(&mut self, model: &Model, state: &WaveState, eval: &Evaluation, dt: Option<f64>) -> Result<DiagnosticsRecord> {
        let v = &eval.velocity.v;
        let a = &eval.pressure.taylor_a;
        let h = mean_curvature(&state.eta);
        let (curvature_l2, curvature_lp) = curvature_norms(&h, self.settings.curvature_p);
        let u = good_unknown(state)?;
        let (dt_u, good_unknown_residual) = match (&self.previous, dt) {
            (Some((prev, prev_a, prev_u)), Some(dt)) => (
                u.iter().zip(prev_u).map(|(x, y)| (x - y).scale(1.0 / dt)).collect(),
                good_unknown_residual(prev, prev_a, state, a, dt)?,
            ),
            _ => (good_unknown_rate(state, eval)?, 0.0),
        };
        let e_symm = if a.min() > 0.0 { symmetrizer_energy(state, eval, &dt_u, self.settings.s)? } else { f64::NAN };
        let zeta = if self.settings.zeta_residual { zeta_residual(model, state, eval)? } else { f64::NAN };
        let record = DiagnosticsRecord {
            t: state.t,
            e_basic: basic_energy(&state.eta, &eval.map, v),
            e_s: e_s(&state.eta, v, self.settings.s)?,
            e_symm,
            a_min: a.min(),
            depth_min: 1.0 + state.eta.min(),
            curvature_l2,
            curvature_lp,
            lipschitz_v: lipschitz_v(&eval.map, v),
            zeta_residual: zeta,
            div_residual: eval.velocity.div_residual,
            curl_residual: eval.velocity.curl_residual,
            good_unknown_residual,
            backend_gap: f64::NAN,
        };
        self.previous = Some((state.clone(), a.clone(), u));
        Ok(record)
    }
}

/// Which continuation hypothesis failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `−∂P/∂n ≥ c₀` on the surface.
    TaylorSign,
    /// `1 + η ≥ h₀`.
    Depth,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::TaylorSign => write!(f, "Taylor sign (a >= c0)"),
            Hypothesis::Depth => write!(f, "depth (1 + eta >= h0)"),
        }
    }
}

/// Summary of a trajectory against the continuation criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownReport {
    pub t_final: f64,
    pub sup_curvature_l2: f64,
    pub sup_curvature_lp: f64,
    pub sup_lipschitz_v: f64,
    /// `sup_t (‖H‖_{L^p ∩ L²} + ‖v‖_{W^{1,∞}})`.
    pub monitor: f64,
    pub min_a: f64,
    pub min_depth: f64,
    pub taylor_violation: Option<f64>,
    pub depth_violation: Option<f64>,
    pub first_failure: Option<Hypothesis>,
    pub abort: Option<String>,
}

pub fn breakdown_report(records: &[DiagnosticsRecord], c0: f64, h0: f64, abort: Option<String>) -> BreakdownReport {
    let sup = |f: fn(&DiagnosticsRecord) -> f64| records.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let inf = |f: fn(&DiagnosticsRecord) -> f64| records.iter().map(f).fold(f64::INFINITY, f64::min);
    let taylor_violation = records.iter().find(|r| !(r.a_min >= c0)).map(|r| r.t);
    let depth_violation = records.iter().find(|r| !(r.depth_min >= h0)).map(|r| r.t);
    let first_failure = match (taylor_violation, depth_violation) {
        (Some(a), Some(b)) if b < a => Some(Hypothesis::Depth),
        (Some(_), _) => Some(Hypothesis::TaylorSign),
        (None, Some(_)) => Some(Hypothesis::Depth),
        (None, None) => None,
    };
    BreakdownReport {
        t_final: records.last().map_or(0.0, |r| r.t),
        sup_curvature_l2: sup(|r| r.curvature_l2),
        sup_curvature_lp: sup(|r| r.curvature_lp),
        sup_lipschitz_v: sup(|r| r.lipschitz_v),
        monitor: sup(|r| r.curvature_l2 + r.curvature_lp + r.lipschitz_v),
        min_a: inf(|r| r.a_min),
        min_depth: inf(|r| r.depth_min),
        taylor_violation,
        depth_violation,
        first_failure,
        abort,
    }
}

impl fmt::Display for BreakdownReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let when = |t: Option<f64>| t.map_or("never".to_string(), |t| format!("t = {t}"));
        writeln!(f, "t_final = {}", self.t_final)?;
        writeln!(f, "sup curvature L2 = {}", self.sup_curvature_l2)?;
        writeln!(f, "sup curvature Lp = {}", self.sup_curvature_lp)?;
        writeln!(f, "sup lipschitz v = {}", self.sup_lipschitz_v)?;
        writeln!(f, "M(T) = {}", self.monitor)?;
        writeln!(f, "min a = {}", self.min_a)?;
        writeln!(f, "min depth = {}", self.min_depth)?;
        writeln!(f, "Taylor sign violated: {}", when(self.taylor_violation))?;
        writeln!(f, "depth violated: {}", when(self.depth_violation))?;
        match self.first_failure {
            Some(h) => writeln!(f, "first failed hypothesis: {h}")?,
            None => writeln!(f, "first failed hypothesis: none")?,
        }
        if let Some(a) = &self.abort {
            writeln!(f, "aborted: {a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::assemble_rhs;
    use crate::spectral::GridSpec;

    #[test]
    fn curvature_of_small_cosine() {
        let g = GridSpec::new(1, 64, 9).unwrap();
        let eps = 1e-3;
        let eta = SurfaceField::from_fn(&g, |x| eps * x[0].cos());
        let h = mean_curvature(&eta);
        assert!((&h + &eta).max_abs() < 2.0 * eps.powi(3));
        let (l2, _) = curvature_norms(&h, 5.0);
        assert!((l2 / (eps * std::f64::consts::PI.sqrt()) - 1.0).abs() < 1e-5);
        assert_eq!(mean_curvature(&SurfaceField::constant(&g, 0.3)).max_abs(), 0.0);
    }

    #[test]
    fn curvature_identity_holds() {
        let g = GridSpec::new(1, 128, 9).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.2 * x[0].sin() + 0.05 * (3.0 * x[0]).cos());
        assert!(curvature_identity_residual(&eta) < 1e-10);
    }

    #[test]
    fn energy_of_still_cosine() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
        let map = FlatteningMap::build(&eta, 0.5, None).unwrap();
        let v = vec![StripField::zeros(&g); 2];
        let e = basic_energy(&eta, &map, &v);
        assert!((e - 0.01 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn rest_records() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let s = WaveState::rest(&g);
        let model = Model::default();
        let eval = assemble_rhs(&model, &s).unwrap();
        let mut m = Monitor::new(MonitorSettings::default());
        let r = m.record(&model, &s, &eval, None).unwrap();
        assert_eq!(r.e_basic, 0.0);
        assert_eq!(r.e_symm, 0.0);
        assert!((r.a_min - 1.0).abs() < 1e-12);
        assert_eq!(r.zeta_residual, 0.0);
        let r2 = m.record(&model, &s, &eval, Some(0.1)).unwrap();
        assert_eq!(r2.good_unknown_residual, 0.0);
        let report = breakdown_report(&[r, r2], 1.5, 0.5, None);
        assert_eq!(report.first_failure, Some(Hypothesis::TaylorSign));
        assert_eq!(report.taylor_violation, Some(0.0));
        assert_eq!(report.depth_violation, None);
        let ok = breakdown_report(&[r, r2], 0.5, 0.5, None);
        assert_eq!(ok.first_failure, None);
        assert_eq!(ok.monitor, 0.0);
    }

    #[test]
    fn symmetrizer_matches_half_derivative() {
        // at rest geometry with a = 1: ‖T_{|ξ|^{1/2}} U‖_{H^{s−1/2}} ≈ ‖U‖_{H^s}
        let g = GridSpec::new(1, 64, 17).unwrap();
        let mut s = WaveState::rest(&g);
        s.v[0] = SurfaceField::from_fn(&g, |x| (9.0 * x[0]).cos() + 0.5 * (12.0 * x[0]).sin());
        let model = Model::default();
        let eval = assemble_rhs(&model, &WaveState::rest(&g)).unwrap();
        let zero = vec![SurfaceField::zeros(&g)];
        let e = symmetrizer_energy(&s, &eval, &zero, 1.5).unwrap();
        let du = paraproduct_advection(&s.v, &s.v[0]).unwrap();
        let reference = sobolev_norm(&s.v[0], 1.5).unwrap() + sobolev_norm(&du, 1.0).unwrap();
        let ratio = e / reference;
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn steady_shear_residuals() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let s = WaveState::shear(&g, 0.3);
        let model = Model::default();
        let eval = assemble_rhs(&model, &s).unwrap();
        assert!(zeta_residual(&model, &s, &eval).unwrap() < 1e-10);
        let a = &eval.pressure.taylor_a;
        assert!(good_unknown_residual(&s, a, &s, a, 0.1).unwrap() < 1e-8);
    }
}
