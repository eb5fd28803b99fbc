use num_complex::Complex64;
use proptest::prelude::*;

use waterwave::diagnostics::{curvature_identity_residual, DiagnosticsRecord};
use waterwave::dn::{DirichletNeumann, DnBottom};
use waterwave::dynamics::WaveState;
use waterwave::io::{diagnostics_csv, parse_diagnostics, Snapshot};
use waterwave::paradiff::{bony_remainder, paraproduct};
use waterwave::spectral::dyadic::{block_weight, low_pass_weight};
use waterwave::spectral::{DyadicDecomposition, GridSpec, StripField, SurfaceField};

/// Real field from a few cosine/sine amplitudes on modes `1..=len`.
fn trig_field(grid: &GridSpec, amps: &[(f64, f64)]) -> SurfaceField {
    SurfaceField::from_fn(grid, |x| {
        amps.iter().enumerate().map(|(m, (a, b))| {
            let k = (m + 1) as f64;
            a * (k * x[0]).cos() + b * (k * x[0]).sin()
        }).sum()
    })
}

fn amps(len: usize, scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-scale..scale, -scale..scale), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_partition_unity(r in 0.0f64..5000.0) {
        let total: f64 = (0..16).map(|k| block_weight(k, r)).sum();
        prop_assert!((total - low_pass_weight(15, r)).abs() < 1e-14);
        if r < 1.1 * 2f64.powi(15) {
            prop_assert!((total - 1.0).abs() < 1e-14);
        }
        for k in 0..16 {
            prop_assert!(block_weight(k, r) >= 0.0);
        }
    }

    #[test]
    fn blocks_reconstruct(a in amps(40, 1.0)) {
        let g = GridSpec::new(1, 128, 9).unwrap();
        let u = trig_field(&g, &a);
        let back = DyadicDecomposition::new(&u).reconstruct();
        prop_assert!((&back - &u).max_abs() <= 1e-13 * u.max_abs().max(1e-300));
    }

    #[test]
    fn bony_identity_holds(a in amps(20, 1.0), b in amps(20, 1.0)) {
        let g = GridSpec::new(1, 64, 9).unwrap();
        let (fa, fu) = (trig_field(&g, &a), trig_field(&g, &b));
        let sum = &(&paraproduct(&fa, &fu).unwrap() + &paraproduct(&fu, &fa).unwrap()) + &bony_remainder(&fu, &fa).unwrap();
        let defect = (&fa.product(&fu) - &sum).max_abs();
        prop_assert!(defect <= 1e-12 * fa.max_abs() * fu.max_abs() + 1e-300);
    }

    #[test]
    fn paraproduct_of_constant_symbol(c in -3.0f64..3.0, b in amps(20, 1.0)) {
        // T_c u keeps only the frequencies u has beyond the lowest blocks
        let g = GridSpec::new(1, 64, 9).unwrap();
        let u = trig_field(&g, &b);
        let tc = paraproduct(&SurfaceField::constant(&g, c), &u).unwrap();
        let high = u.apply_multiplier(|xi| if xi[0].abs() >= 8.0 { 1.0 } else { 0.0 });
        let tc_high = tc.apply_multiplier(|xi| if xi[0].abs() >= 8.0 { 1.0 } else { 0.0 });
        prop_assert!((&tc_high - &high.scale(c)).max_abs() < 1e-12 * (1.0 + u.max_abs()));
    }

    #[test]
    fn curvature_identity_random(a in amps(4, 0.05)) {
        let g = GridSpec::new(1, 128, 9).unwrap();
        let eta = trig_field(&g, &a);
        prop_assert!(curvature_identity_residual(&eta) < 1e-8);
    }

    #[test]
    fn snapshot_bytes_roundtrip(vals in prop::collection::vec(any::<f64>(), 16 * 4 + 16 * 9), t in any::<f64>()) {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let mut s = WaveState::rest(&g);
        s.t = t;
        let f = |i: usize| SurfaceField::from_values(&g, vals[16 * i..16 * (i + 1)].to_vec()).unwrap();
        s.eta = f(0);
        s.v[0] = f(1);
        s.b = f(2);
        s.vb[0] = f(3);
        s.omega[0] = StripField::from_values(&g, vals[64..].to_vec()).unwrap();
        let snap = Snapshot::from_state(&s);
        let back = Snapshot::from_bytes(&snap.to_bytes()).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(back.t.to_bits(), t.to_bits());
        for ((na, a), (nb, b)) in snap.fields.iter().zip(&back.fields) {
            prop_assert_eq!(na, nb);
            prop_assert_eq!(bits(a), bits(b));
        }
    }

    #[test]
    fn csv_roundtrip_is_exact(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 14), 1..6)) {
        let records: Vec<DiagnosticsRecord> = rows.iter().map(|r| DiagnosticsRecord::from_values(r).unwrap()).collect();
        let table = parse_diagnostics(&diagnostics_csv(&records, Some("depth violation: test"))).unwrap();
        prop_assert_eq!(table.records.len(), records.len());
        for (a, b) in records.iter().zip(&table.records) {
            prop_assert_eq!(a.values().map(f64::to_bits), b.values().map(f64::to_bits));
        }
        prop_assert_eq!(table.abort.as_deref(), Some("depth violation: test"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dn_symmetric_and_nonnegative(
        eta_amps in amps(3, 0.04),
        fa in amps(8, 1.0),
        ga in amps(8, 1.0),
        neumann in any::<bool>(),
    ) {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let eta = trig_field(&g, &eta_amps);
        let bottom = if neumann { DnBottom::Neumann0 } else { DnBottom::Dirichlet0 };
        let op = DirichletNeumann::for_surface(&eta, bottom).unwrap();
        let (f, h) = (trig_field(&g, &fa), trig_field(&g, &ga));
        let (gf, gh) = (op.apply(&f).unwrap(), op.apply(&h).unwrap());
        prop_assert!((gf.inner(&h) - f.inner(&gh)).abs() <= 1e-8 * f.l2_norm() * h.l2_norm() + 1e-14);
        prop_assert!(gf.inner(&f) >= -1e-10);
    }

    #[test]
    fn neumann_dn_kills_constants(eta_amps in amps(3, 0.05), c in -2.0f64..2.0) {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let op = DirichletNeumann::for_surface(&trig_field(&g, &eta_amps), DnBottom::Neumann0).unwrap();
        prop_assert!(op.apply(&SurfaceField::constant(&g, c)).unwrap().max_abs() < 1e-9);
    }
}

#[test]
fn flat_dn_is_abs_derivative_in_deep_limit() {
    // coth k → 1 quickly, so high modes see |D|
    let g = GridSpec::new(1, 64, 65).unwrap();
    let op = DirichletNeumann::for_surface(&SurfaceField::zeros(&g), DnBottom::Dirichlet0).unwrap();
    let f = SurfaceField::from_fn(&g, |x| (12.0 * x[0]).sin());
    let gf = op.apply(&f).unwrap();
    assert!((&gf - &f.abs_derivative()).max_abs() < 1e-9);
    let c = gf.coeffs()[12];
    assert!(c.norm() > 0.0 && (c / f.coeffs()[12] - Complex64::new(12.0, 0.0)).norm() < 1e-9);
}
