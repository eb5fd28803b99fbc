//! The invariant suite: one check per acceptance criterion, each returning a
//! measured value against its threshold. Used by `ww check` and the
//! `acceptance` test target.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{basic_energy, curvature_identity_residual, good_unknown_residual, Hypothesis};
use crate::dn::{remainder_order_check, DirichletNeumann, DnBottom};
use crate::dynamics::{assemble_rhs, run, Model, StepSize, WaveState};
use crate::elliptic::{Backend, BottomCondition, EllipticProblem};
use crate::error::Result;
use crate::geometry::{EllipticCoefficients, FlatteningMap};
use crate::io::{read_diagnostics, read_snapshot, run_simulation_in, write_snapshot, RunConfig};
use crate::paradiff::{bony_remainder, paraproduct};
use crate::spectral::dyadic::{block_support, dyadic_block_spectrum, max_block};
use crate::spectral::{DyadicDecomposition, GridSpec, StripField, SurfaceField};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [&str; 13] = [
    "Bony identity",
    "Littlewood-Paley partition",
    "factorization identities",
    "flat-surface DN symbols",
    "DN self-adjointness and positivity",
    "paralinearization gain",
    "elliptic backend agreement",
    "rest and stream fixed points",
    "linear dispersion",
    "energy conservation",
    "curvature identity",
    "good-unknown residual order",
    "break-down monitor",
];

/// Random real field with modes `1 ≤ |ξ| ≤ kmax` and amplitudes `~ |ξ|^{-decay}`.
pub fn random_field(grid: &GridSpec, rng: &mut impl Rng, kmax: f64, decay: f64) -> SurfaceField {
    let npts = grid.points();
    let mut c = vec![Complex64::new(0.0, 0.0); npts];
    for (i, ci) in c.iter_mut().enumerate() {
        let k = grid.xi_norm(i);
        if k > 0.0 && k <= kmax && !grid.is_nyquist(i) {
            *ci = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * k.powf(-decay);
        }
    }
    // real part of the inverse transform keeps the band
    let z = crate::spectral::fft::inverse(grid, &c);
    SurfaceField::from_values(grid, z.iter().map(|v| v.re).collect()).expect("grid size")
}

fn rescale_slope(eta: &SurfaceField, max_slope: f64) -> SurfaceField {
    let s = eta.gradient().iter().map(SurfaceField::max_abs).fold(0.0, f64::max);
    eta.scale(max_slope / s)
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }
    fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

fn outcome(id: usize, passed: bool, detail: String, t: &Timer) -> CheckOutcome {
    CheckOutcome { id, name: CRITERIA[id - 1], passed, detail, seconds: t.secs() }
}

fn failed(id: usize, err: crate::Error, t: &Timer) -> CheckOutcome {
    outcome(id, false, format!("error: {err}"), t)
}

/// `max |au − T_a u − T_u a − R(u, a)| ≤ 1e-12 ‖a‖_∞ ‖u‖_∞`, 100 pairs at `N = 128`, under 10 s.
pub fn bony_identity() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 128, 9).expect("grid");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = random_field(&g, &mut rng, 42.0, 0.5);
        let u = random_field(&g, &mut rng, 42.0, 0.5);
        let sum = &(&paraproduct(&a, &u).unwrap() + &paraproduct(&u, &a).unwrap()) + &bony_remainder(&u, &a).unwrap();
        let err = (&a.product(&u) - &sum).max_abs() / (a.max_abs() * u.max_abs());
        worst = worst.max(err);
    }
    let secs = t.secs();
    outcome(1, worst <= 1e-12 && secs < 10.0, format!("max relative defect {worst:.2e} (limit 1e-12), {secs:.2} s (limit 10 s)"), &t)
}

/// Blocks sum back to the field to `1e-13` and vanish outside their annuli.
pub fn littlewood_paley_partition() -> CheckOutcome {
    let t = Timer::start();
    let mut worst: f64 = 0.0;
    let mut leaks = 0usize;
    let mut roundtrip: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (dim, n) in [(1, 128), (1, 256), (2, 64)] {
        let g = GridSpec::new(dim, n, 9).expect("grid");
        for _ in 0..10 {
            let u = random_field(&g, &mut rng, g.max_wavenumber() * 2.0, 0.0);
            let dec = DyadicDecomposition::new(&u);
            worst = worst.max((&dec.reconstruct() - &u).l2_norm() / u.l2_norm());
            let scale = u.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            for k in 0..=max_block(&g) {
                let (lo, hi) = block_support(k).expect("k ≥ 0");
                let spectrum = dyadic_block_spectrum(&u, k);
                let block = dec.block(k).expect("stored block");
                for (i, (c, b)) in spectrum.iter().zip(block.coeffs()).enumerate() {
                    let r = g.xi_norm(i);
                    if r < lo || r > hi {
                        if *c != Complex64::new(0.0, 0.0) {
                            leaks += 1;
                        }
                        roundtrip = roundtrip.max(b.norm() / scale);
                    }
                }
            }
        }
    }
    outcome(
        2,
        worst <= 1e-13 && leaks == 0,
        format!("reconstruction {worst:.2e} (limit 1e-13), {leaks} nonzero block coefficients outside the annuli, sampled-block leakage {roundtrip:.1e}"),
        &t,
    )
}

/// `a·A + α|ξ|²` and `a + A + iβ·ξ` vanish to `1e-12` for 20 admissible coefficient fields.
pub fn factorization_identities() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 32, 9).expect("grid");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut prod, mut sum): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let eta = rescale_slope(&random_field(&g, &mut rng, 4.0, 1.0), rng.gen_range(0.05..0.3));
        let map = match FlatteningMap::build(&eta, 0.5, None) {
            Ok(m) => m,
            Err(e) => return failed(3, e, &t),
        };
        let coeffs = EllipticCoefficients::from_map(&map);
        let sym = match crate::elliptic::factorization_symbols(&coeffs) {
            Ok(s) => s,
            Err(e) => return failed(3, e, &t),
        };
        for j in 0..g.nz {
            for mode in 0..g.points() {
                let xi = g.xi(mode);
                let k2 = xi[0] * xi[0] + xi[1] * xi[1];
                for ix in 0..g.points() {
                    let a = sym.a[j].eval(ix, xi);
                    let big = sym.big_a[j].eval(ix, xi);
                    let alpha = coeffs.alpha.level(j)[ix];
                    let bxi = coeffs.beta[0].level(j)[ix] * xi[0];
                    prod = prod.max((a * big + alpha * k2).norm());
                    sum = sum.max((a + big + Complex64::new(0.0, bxi)).norm());
                }
            }
        }
    }
    outcome(3, prod <= 1e-12 && sum <= 1e-12, format!("sup |aA + α|ξ|²| = {prod:.2e}, sup |a + A + iβ·ξ| = {sum:.2e} (limit 1e-12)"), &t)
}

/// `G(0) cos kx = k coth k cos kx` (Dirichlet) and `k tanh k cos kx` (Neumann) to `1e-6`,
/// `k = 1..N/4`, `N = 128`, `N_z = 129`, under 30 s.
pub fn flat_dn_symbols() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 128, 129).expect("grid");
    let flat = SurfaceField::zeros(&g);
    let mut worst: f64 = 0.0;
    for bottom in [DnBottom::Dirichlet0, DnBottom::Neumann0] {
        let op = match DirichletNeumann::for_surface(&flat, bottom) {
            Ok(op) => op,
            Err(e) => return failed(4, e, &t),
        };
        for k in 1..=g.n / 4 {
            let kf = k as f64;
            let f = SurfaceField::from_fn(&g, |x| (kf * x[0]).cos());
            let gf = match op.apply(&f) {
                Ok(v) => v,
                Err(e) => return failed(4, e, &t),
            };
            let symbol = match bottom {
                DnBottom::Dirichlet0 => kf / kf.tanh(),
                DnBottom::Neumann0 => kf * kf.tanh(),
            };
            worst = worst.max((&gf - &f.scale(symbol)).l2_norm() / (symbol * f.l2_norm()));
        }
    }
    let secs = t.secs();
    outcome(4, worst <= 1e-6 && secs < 30.0, format!("max relative error {worst:.2e} (limit 1e-6), {secs:.2} s (limit 30 s)"), &t)
}

/// Symmetry and positivity of `G(η)` for `η = 0.1 cos x`, 50 random pairs per bottom.
pub fn dn_selfadjoint_positive() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 64, 33).expect("grid");
    let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut asym: f64 = 0.0;
    let mut min_form = f64::INFINITY;
    for bottom in [DnBottom::Dirichlet0, DnBottom::Neumann0] {
        let op = match DirichletNeumann::for_surface(&eta, bottom) {
            Ok(op) => op,
            Err(e) => return failed(5, e, &t),
        };
        for _ in 0..50 {
            let f = random_field(&g, &mut rng, 12.0, 1.0);
            let h = random_field(&g, &mut rng, 12.0, 1.0);
            let (gf, gh) = match (op.apply(&f), op.apply(&h)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return failed(5, e, &t),
            };
            asym = asym.max((gf.inner(&h) - f.inner(&gh)).abs() / (f.l2_norm() * h.l2_norm()));
            min_form = min_form.min(gf.inner(&f)).min(gh.inner(&h));
        }
    }
    outcome(
        5,
        asym <= 1e-8 && min_form >= -1e-10,
        format!("max |<Gf,g> - <f,Gg>|/(|f||g|) = {asym:.2e} (limit 1e-8), min <Gf,f> = {min_form:.3e} (limit -1e-10)"),
        &t,
    )
}

/// Remainder slope at least `0.75` below the DN slope over `k = 2..N/4` for `η = 0.1 cos x`.
pub fn paralinearization_gain() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 128, 129).expect("grid");
    let eta = SurfaceField::from_fn(&g, |x| 0.1 * x[0].cos());
    let mut pass = true;
    let mut parts = Vec::new();
    for bottom in [DnBottom::Dirichlet0, DnBottom::Neumann0] {
        let report = match DirichletNeumann::for_surface(&eta, bottom).and_then(|op| remainder_order_check(&op, 2..=g.n / 4)) {
            Ok(r) => r,
            Err(e) => return failed(6, e, &t),
        };
        pass &= report.remainder_slope <= report.dn_slope - 0.75;
        parts.push(format!("{bottom:?}: DN slope {:.3}, remainder slope {:.3}", report.dn_slope, report.remainder_slope));
    }
    outcome(6, pass, parts.join("; "), &t)
}

fn manufactured(g: &GridSpec, rng: &mut impl Rng) -> StripField {
    let (p, q) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
    let (m, c1, c2) = (rng.gen_range(1..4) as f64, rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
    StripField::from_fn(g, move |x, z| {
        (x[0] + p).sin() * (c1 * z).exp() + c2 * (m * x[0] + q).cos() * (z + 0.3).powi(3) + 0.2 * z * z
    })
}

/// Factored vs direct backends on 20 manufactured problems.
pub fn elliptic_backend_agreement() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 64, 33).expect("grid");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut gap_ratio, mut err_d, mut err_f): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for case in 0..20 {
        let eta = rescale_slope(&random_field(&g, &mut rng, 3.0, 1.0), rng.gen_range(0.05..0.25));
        let exact = manufactured(&g, &mut rng);
        let map = match FlatteningMap::build(&eta, 0.5, None) {
            Ok(m) => m,
            Err(e) => return failed(7, e, &t),
        };
        let coeffs = EllipticCoefficients::from_map(&map);
        let f0 = EllipticProblem::new(coeffs.clone(), StripField::zeros(&g), exact.top(), BottomCondition::dirichlet_zero(&g))
            .apply_operator(&exact);
        let bottom = if case % 2 == 0 {
            BottomCondition::Dirichlet(exact.bottom())
        } else {
            BottomCondition::Neumann(exact.dz().bottom())
        };
        let p = EllipticProblem::new(coeffs, f0, exact.top(), bottom);
        let (d, f) = match (p.solve(Backend::Direct), p.solve(Backend::Factored)) {
            (Ok(d), Ok(f)) => (d, f),
            (Err(e), _) | (_, Err(e)) => return failed(7, e, &t),
        };
        let combined = 2.0 * p.tolerance * exact.l2_norm();
        gap_ratio = gap_ratio.max(d.v.sub(&f.v).l2_norm() / combined);
        err_d = err_d.max(d.v.sub(&exact).l2_norm() / exact.l2_norm());
        err_f = err_f.max(f.v.sub(&exact).l2_norm() / exact.l2_norm());
    }
    outcome(
        7,
        gap_ratio <= 10.0 && err_d <= 1e-8 && err_f <= 2e-8,
        format!("backend gap {gap_ratio:.2} x combined tolerance (limit 10), error direct {err_d:.2e} (limit 1e-8), factored {err_f:.2e} (limit 2e-8)"),
        &t,
    )
}

/// Rest and uniform stream are fixed points; `a = 1` at rest.
pub fn fixed_points() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 64, 33).expect("grid");
    let model = Model::default();
    let mut worst: f64 = 0.0;
    let mut a_dev: f64 = 0.0;
    for state in [WaveState::rest(&g), WaveState::stream(&g, 0.5), WaveState::stream(&g, -1.3)] {
        match assemble_rhs(&model, &state) {
            Ok(e) => {
                worst = worst.max(e.derivative.max_abs());
                if state.v[0].max_abs() == 0.0 {
                    a_dev = a_dev.max(e.pressure.taylor_a.map(|a| a - 1.0).max_abs());
                }
            }
            Err(e) => return failed(8, e, &t),
        }
    }
    outcome(8, worst <= 1e-10 && a_dev <= 1e-10, format!("max |rhs| {worst:.2e}, max |a - 1| at rest {a_dev:.2e} (limits 1e-10)"), &t)
}

/// Period and energy drift of a linear standing wave.
#[derive(Debug, Clone, Copy)]
pub struct StandingWaveRun {
    pub mode: usize,
    pub period: f64,
    pub measured: f64,
    pub drift_per_time: f64,
    pub seconds: f64,
}

/// One period of `η = 10⁻⁴ cos(kx)` at `N = 128`, `N_z = 33`.
pub fn standing_wave_run(mode: usize, cfl: f64) -> Result<StandingWaveRun> {
    let t = Timer::start();
    let g = GridSpec::new(1, 128, 33)?;
    let k = mode as f64;
    let period = 2.0 * std::f64::consts::PI / (k * k.tanh()).sqrt();
    let initial = WaveState::standing_wave(&g, 1e-4, mode);
    let model = Model { cfl_safety: cfl, ..Model::default() }.freeze_delta(&initial.eta)?;
    let mut amp = Vec::new();
    let mut energy = Vec::new();
    let out = run(&model, initial, period, StepSize::Cfl, |s, e, _| {
        amp.push((s.t, 2.0 * s.eta.coeffs()[mode].re));
        energy.push(basic_energy(&s.eta, &e.map, &e.velocity.v));
    });
    if let Some(e) = out.abort {
        return Err(e);
    }
    let mut crossings = Vec::new();
    for w in amp.windows(2) {
        let ((t0, a0), (t1, a1)) = (w[0], w[1]);
        if (a0 > 0.0) != (a1 > 0.0) {
            crossings.push(t0 + (t1 - t0) * a0 / (a0 - a1));
        }
    }
    let measured = if crossings.len() >= 2 { 2.0 * (crossings[1] - crossings[0]) } else { f64::NAN };
    let e0 = energy[0];
    let drift = energy.iter().map(|e| (e - e0).abs() / e0).fold(0.0, f64::max) / out.last.t;
    Ok(StandingWaveRun { mode, period, measured, drift_per_time: drift, seconds: t.secs() })
}

const DISPERSION_CFL: f64 = 0.25;

fn dispersion_runs() -> Result<Vec<StandingWaveRun>> {
    [1, 2, 4].iter().map(|&m| standing_wave_run(m, DISPERSION_CFL)).collect()
}

/// Measured period within 1% of `2π/√(k tanh k)` for `k ∈ {1, 2, 4}`, under 2 min.
pub fn linear_dispersion(runs: &Result<Vec<StandingWaveRun>>) -> CheckOutcome {
    let t = Timer::start();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return outcome(9, false, format!("error: {e}"), &t),
    };
    let mut worst: f64 = 0.0;
    let mut secs = 0.0;
    for r in runs {
        worst = worst.max((r.measured / r.period - 1.0).abs());
        secs += r.seconds;
    }
    let mut o = outcome(9, worst <= 0.01 && secs < 120.0, format!("max period error {:.2e} (limit 1e-2), {secs:.1} s (limit 120 s)", worst), &t);
    o.seconds = secs;
    o
}

/// Relative drift of `E_basic` at most `1e-6` per unit time on the dispersion runs.
pub fn energy_law(runs: &Result<Vec<StandingWaveRun>>) -> CheckOutcome {
    let t = Timer::start();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return outcome(10, false, format!("error: {e}"), &t),
    };
    let worst = runs.iter().map(|r| r.drift_per_time).fold(0.0, f64::max);
    let per: Vec<String> = runs.iter().map(|r| format!("k={}: {:.1e}", r.mode, r.drift_per_time)).collect();
    outcome(10, worst <= 1e-6, format!("max drift per unit time {worst:.2e} (limit 1e-6; {})", per.join(", ")), &t)
}

/// Divergence-form curvature identity to `1e-8` for 20 random surfaces with slope ≤ 0.5.
pub fn curvature_identity() -> CheckOutcome {
    let t = Timer::start();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g = if i % 4 == 3 { GridSpec::new(2, 64, 9) } else { GridSpec::new(1, 256, 9) }.expect("grid");
        let kmax = if g.dim == 2 { 2.5 } else { 5.0 };
        let eta = rescale_slope(&random_field(&g, &mut rng, kmax, 1.0), rng.gen_range(0.1..0.5));
        worst = worst.max(curvature_identity_residual(&eta));
    }
    outcome(11, worst <= 1e-8, format!("max residual {worst:.2e} (limit 1e-8)"), &t)
}

/// Good-unknown residual at `t = 1` for `dt`, `dt/2`, `dt/4`; fitted order at least 1.75.
pub fn good_unknown_order() -> CheckOutcome {
    let t = Timer::start();
    let g = GridSpec::new(1, 64, 33).expect("grid");
    let initial = WaveState::standing_wave(&g, 0.05, 1);
    let model = match (Model { filter: false, ..Model::default() }).freeze_delta(&initial.eta) {
        Ok(m) => m,
        Err(e) => return failed(12, e, &t),
    };
    let steps = [0.1, 0.05, 0.025];
    let mut residuals = Vec::new();
    for &dt in &steps {
        let mut prev: Option<(WaveState, SurfaceField)> = None;
        let mut last = f64::NAN;
        let mut err = None;
        let out = run(&model, initial.clone(), 1.0, StepSize::Fixed(dt), |s, e, _| {
            if let Some((p, pa)) = &prev {
                if s.t > 1.0 - 1e-9 {
                    match good_unknown_residual(p, pa, s, &e.pressure.taylor_a, dt) {
                        Ok(r) => last = r,
                        Err(e) => err = Some(e),
                    }
                }
            }
            prev = Some((s.clone(), e.pressure.taylor_a.clone()));
        });
        if let Some(e) = out.abort.or(err) {
            return failed(12, e, &t);
        }
        residuals.push(last);
    }
    let order = crate::paradiff::loglog_slope(&steps, &residuals);
    let ratios: Vec<String> = residuals.windows(2).map(|w| format!("{:.2}", w[0] / w[1])).collect();
    outcome(
        12,
        order >= 1.75,
        format!("residuals {:.2e}, {:.2e}, {:.2e}; halving ratios {}; order {order:.3} (limit 1.75)", residuals[0], residuals[1], residuals[2], ratios.join(", ")),
        &t,
    )
}

/// Break-down monitor: Taylor-sign first violation at `t = 0` at rest with `c₀ > 1`,
/// the right first-violation time on a moving run, and the depth abort path.
pub fn breakdown_monitor() -> CheckOutcome {
    let t = Timer::start();
    let dir = match tempfile_dir() {
        Ok(d) => d,
        Err(e) => return outcome(13, false, format!("error: {e}"), &t),
    };
    let mut notes = Vec::new();
    let mut pass = true;

    // rest with c0 above the rest value of a
    let rest = RunConfig::parse_str("grid.N = 32\ngrid.Nz = 17\nT_final = 0.5\nc0 = 1.5\n").expect("static config");
    match run_simulation_in(&rest, &dir.join("rest")) {
        Ok(s) => {
            let ok = s.exit_code() == 0 && s.report.first_failure == Some(Hypothesis::TaylorSign) && s.report.taylor_violation == Some(0.0);
            pass &= ok;
            notes.push(format!("rest: first failure {:?} at {:?}", s.report.first_failure, s.report.taylor_violation));
        }
        Err(e) => return outcome(13, false, format!("error: {e}"), &t),
    }

    // moving surface: a dips below c0 after the start
    let g = GridSpec::new(1, 32, 17).expect("grid");
    let kick = dir.join("kick.wwsn");
    if let Err(e) = write_snapshot(&WaveState::potential_mode(&g, 1, -0.2), &kick) {
        return outcome(13, false, format!("error: {e}"), &t);
    }
    let moving = RunConfig::parse_str(&format!(
        "grid.N = 32\ngrid.Nz = 17\nT_final = 2\nc0 = 0.95\nh0 = 0.5\ninitial.kind = file\ninitial.path = {}\n",
        kick.display()
    ))
    .expect("static config");
    match run_simulation_in(&moving, &dir.join("moving")) {
        Ok(s) => {
            let table = read_diagnostics(&dir.join("moving").join("diagnostics.csv"));
            let expected = table.ok().and_then(|tb| tb.records.iter().find(|r| r.a_min < 0.95).map(|r| r.t));
            let ok = s.exit_code() == 0
                && s.report.first_failure == Some(Hypothesis::TaylorSign)
                && expected.is_some_and(|x| x > 0.0)
                && s.report.taylor_violation == expected;
            pass &= ok;
            notes.push(format!("moving: Taylor sign first violated at {:?} (CSV {:?})", s.report.taylor_violation, expected));
        }
        Err(e) => return outcome(13, false, format!("error: {e}"), &t),
    }

    // depth abort
    let deep = dir.join("deep.wwsn");
    if let Err(e) = write_snapshot(&WaveState::potential_mode(&g, 1, -0.3), &deep) {
        return outcome(13, false, format!("error: {e}"), &t);
    }
    let depth = RunConfig::parse_str(&format!(
        "grid.N = 32\ngrid.Nz = 17\nT_final = 4\nh0 = 1.6\ninitial.kind = file\ninitial.path = {}\n",
        deep.display()
    ))
    .expect("static config");
    let out = dir.join("depth");
    match run_simulation_in(&depth, &out) {
        Ok(s) => {
            let snapshot = read_snapshot(&out.join("final.wwsn"));
            let table = read_diagnostics(&out.join("diagnostics.csv"));
            let ok = s.exit_code() == 2
                && snapshot.as_ref().is_ok_and(|st| st.t == s.final_state.t)
                && table.is_ok_and(|tb| tb.abort.is_some());
            pass &= ok;
            notes.push(format!("depth: exit {} at t = {:.3}, final snapshot {}", s.exit_code(), s.final_state.t, if snapshot.is_ok() { "written" } else { "missing" }));
        }
        Err(e) => return outcome(13, false, format!("error: {e}"), &t),
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(13, pass, notes.join("; "), &t)
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("ww-check-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Run every criterion in order, calling `report` as each finishes.
pub fn run_all(mut report: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut push = |o: CheckOutcome| {
        report(&o);
        out.push(o);
    };
    push(bony_identity());
    push(littlewood_paley_partition());
    push(factorization_identities());
    push(flat_dn_symbols());
    push(dn_selfadjoint_positive());
    push(paralinearization_gain());
    push(elliptic_backend_agreement());
    push(fixed_points());
    let runs = dispersion_runs();
    push(linear_dispersion(&runs));
    push(energy_law(&runs));
    push(curvature_identity());
    push(good_unknown_order());
    push(breakdown_monitor());
    out
}
