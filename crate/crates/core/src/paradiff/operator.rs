use num_complex::Complex64;

use super::symbol::SymbolField;
use crate::error::{Error, Result};
use crate::spectral::dyadic::{block_weight, bump_k, high_pass_cutoff, max_block};
use crate::spectral::{fft, GridSpec, SurfaceField};

/// Weight of the pair (symbol frequency `θ`, input frequency `ξ`) in `T_a`,
/// restricted to the blocks in `blocks`.
fn pair_weight(theta: f64, xi: f64, blocks: std::ops::RangeInclusive<i32>) -> f64 {
    blocks.map(|k| block_weight(k, xi) * bump_k(k - 3, theta)).sum()
}

fn modular_sum(g: &GridSpec, a: usize, b: usize) -> usize {
    let [ai, aj] = g.axes(a);
    let [bi, bj] = g.axes(b);
    let n = g.n;
    if g.dim == 1 {
        (ai + bi) % n
    } else {
        ((ai + bi) % n) * n + (aj + bj) % n
    }
}

fn apply_blocks(a: &SymbolField, u: &SurfaceField, blocks: std::ops::RangeInclusive<i32>) -> Result<SurfaceField> {
    let g = *u.grid();
    if !a.grid().same_horizontal(&g) {
        return Err(Error::GridMismatch);
    }
    u.ensure_finite("paradifferential input")?;
    let npts = g.points();
    let uh = u.coeffs();
    let mut out = vec![Complex64::new(0.0, 0.0); npts];
    for mode in 0..npts {
        if g.is_nyquist(mode) || uh[mode] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let r = g.xi_norm(mode);
        let lead = uh[mode] * high_pass_cutoff(r);
        if pair_weight(0.0, r, blocks.clone()) == 0.0 || lead == Complex64::new(0.0, 0.0) {
            continue;
        }
        if a.is_x_independent() {
            let v = a.eval(0, g.xi(mode));
            if !v.is_finite() {
                return Err(Error::NonFinite("symbol"));
            }
            out[mode] += lead * v * pair_weight(0.0, r, blocks.clone());
            continue;
        }
        let col = a.column_spectrum(mode);
        for (theta, c) in col.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("symbol"));
            }
            let w = pair_weight(g.xi_norm(theta), r, blocks.clone());
            if w != 0.0 {
                out[modular_sum(&g, mode, theta)] += lead * c * w;
            }
        }
    }
    let values: Vec<f64> = fft::inverse(&g, &out).into_iter().map(|z| z.re).collect();
    SurfaceField::from_values(&g, values)
}

/// `T_a u = Σ_k Op(S_{k-3} a) ψ(D) Δ_k u` for a symbol `a(x, ξ)`.
///
/// The real part is returned; it is exact whenever `a(x, -ξ) = conj a(x, ξ)`.
pub fn paradiff_apply(a: &SymbolField, u: &SurfaceField) -> Result<SurfaceField> {
    apply_blocks(a, u, 3..=max_block(u.grid()))
}

/// Contribution of block `k` alone.
pub fn paradiff_block(a: &SymbolField, u: &SurfaceField, k: i32) -> Result<SurfaceField> {
    if k < 3 {
        return Ok(SurfaceField::zeros(u.grid()));
    }
    apply_blocks(a, u, k..=k)
}

/// `M^m_ρ(a)` restricted to `|α| ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSeminorm {
    pub m: f64,
    pub rho: f64,
    pub value: f64,
}

/// Discrete `W^{ρ,∞}` norm of a complex periodic column, `0 ≤ ρ ≤ 2`.
fn w_rho_inf(g: &GridSpec, col: &[Complex64], rho: f64) -> f64 {
    let sup = |v: &[Complex64]| v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut total = sup(col);
    if rho == 0.0 {
        return total;
    }
    let spec = fft::forward_complex(g, col);
    let deriv = |alpha: [u32; 2]| -> Vec<Complex64> {
        let c: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if g.is_nyquist(i) {
                    return Complex64::new(0.0, 0.0);
                }
                let xi = g.xi(i);
                c * Complex64::new(0.0, xi[0]).powu(alpha[0]) * Complex64::new(0.0, xi[1]).powu(alpha[1])
            })
            .collect();
        fft::inverse(g, &c)
    };
    let whole = rho.floor() as u32;
    let frac = rho - rho.floor();
    let multi = |order: u32| -> Vec<[u32; 2]> {
        if g.dim == 1 {
            vec![[order, 0]]
        } else {
            (0..=order).map(|i| [i, order - i]).collect()
        }
    };
    for order in 1..=whole {
        for alpha in multi(order) {
            total += sup(&deriv(alpha));
        }
    }
    if frac > 0.0 {
        let top: Vec<Vec<Complex64>> =
            if whole == 0 { vec![col.to_vec()] } else { multi(whole).into_iter().map(deriv).collect() };
        let h = g.dx();
        let mut holder = 0.0f64;
        for f in &top {
            for shift in 1..=g.n / 2 {
                let dist = (shift as f64 * h).powf(frac);
                for i in 0..g.points() {
                    let [ix, iy] = g.axes(i);
                    let j = if g.dim == 1 { (ix + shift) % g.n } else { ((ix + shift) % g.n) * g.n + iy };
                    holder = holder.max((f[i] - f[j]).norm() / dist);
                    if g.dim == 2 {
                        let j2 = ix * g.n + (iy + shift) % g.n;
                        holder = holder.max((f[i] - f[j2]).norm() / dist);
                    }
                }
            }
        }
        total += holder;
    }
    total
}

/// Discrete `M^m_ρ(a)`: sup over lattice `|ξ| ≥ 1/2` of
/// `‖(1 + |ξ|)^{|α| - m} ∂_ξ^α a(·, ξ)‖_{W^{ρ,∞}}`, `|α| ≤ 2`,
/// with central differences in `ξ`.
pub fn symbol_seminorm(a: &SymbolField, rho: f64) -> Result<SymbolSeminorm> {
    if !(0.0..=2.0).contains(&rho) {
        return Err(Error::Validation { field: "rho".into(), message: format!("{rho} outside [0, 2]") });
    }
    let g = *a.grid();
    let m = a.order();
    let mut value = 0.0f64;
    for mode in 0..g.points() {
        let xi = g.xi(mode);
        let r = g.xi_norm(mode);
        if g.is_nyquist(mode) || r < 0.5 {
            continue;
        }
        let h = 1e-3 * (1.0 + r);
        let shifted = |d: [f64; 2]| a.column([xi[0] + d[0] * h, xi[1] + d[1] * h]);
        let c0 = a.column(xi);
        let mut terms: Vec<(u32, Vec<Complex64>)> = vec![(0, c0.clone())];
        for i in 0..g.dim {
            let mut e = [0.0; 2];
            e[i] = 1.0;
            let p = shifted(e);
            let n = shifted([-e[0], -e[1]]);
            let d1 = p.iter().zip(&n).map(|(x, y)| (x - y) / (2.0 * h)).collect();
            let d2 = p.iter().zip(&n).zip(&c0).map(|((x, y), z)| (x + y - 2.0 * z) / (h * h)).collect();
            terms.push((1, d1));
            terms.push((2, d2));
        }
        if g.dim == 2 {
            let pp = shifted([1.0, 1.0]);
            let pm = shifted([1.0, -1.0]);
            let mp = shifted([-1.0, 1.0]);
            let mm = shifted([-1.0, -1.0]);
            let mixed = (0..c0.len()).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h)).collect();
            terms.push((2, mixed));
        }
        for (order, col) in terms {
            let weight = (1.0 + r).powf(order as f64 - m);
            value = value.max(weight * w_rho_inf(&g, &col, rho));
        }
    }
    Ok(SymbolSeminorm { m, rho, value })
}

/// `(T_a T_b − T_{ab}) u`, the composition residual at `ρ = 1`.
pub fn composition_residual(a: &SymbolField, b: &SymbolField, u: &SurfaceField) -> Result<SurfaceField> {
    let tab = paradiff_apply(a, &paradiff_apply(b, u)?)?;
    let direct = paradiff_apply(&a.product(b), u)?;
    Ok(&tab - &direct)
}

/// `[⟨D⟩^s, T_a] u`.
pub fn commutator_ds(a: &SymbolField, u: &SurfaceField, s: f64) -> Result<SurfaceField> {
    let japanese = |f: &SurfaceField| f.apply_multiplier(|xi| (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s / 2.0));
    let left = japanese(&paradiff_apply(a, u)?);
    let right = paradiff_apply(a, &japanese(u))?;
    Ok(&left - &right)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dyadic::low_pass;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(1, n, 9).unwrap()
    }

    #[test]
    fn unit_symbol_matches_paraproduct_truncation() {
        let g = grid(64);
        let u = SurfaceField::from_fn(&g, |x| x[0].sin() + (6.0 * x[0]).cos() + 0.3 * (19.0 * x[0]).sin());
        let one = SymbolField::multiplier(&g, 0.0, |_| Complex64::new(1.0, 0.0));
        let t = paradiff_apply(&one, &u).unwrap();
        let expected = &u - &low_pass(&u, 2);
        assert!((&t - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn x_dependent_unit_agrees_with_fast_path() {
        let g = grid(64);
        let u = SurfaceField::from_fn(&g, |x| (9.0 * x[0]).cos() + (21.0 * x[0]).sin());
        let b = SurfaceField::constant(&g, 1.0);
        let t = paradiff_apply(&SymbolField::function(&b), &u).unwrap();
        assert!((&t - &u).max_abs() < 1e-12);
    }

    #[test]
    fn abs_xi_is_multiplier_on_covered_modes() {
        let g = grid(64);
        let u = SurfaceField::from_fn(&g, |x| (10.0 * x[0]).cos() + (17.0 * x[0]).sin());
        let t = paradiff_apply(&SymbolField::abs_xi(&g), &u).unwrap();
        assert!((&t - &u.abs_derivative()).max_abs() < 1e-11);
    }

    #[test]
    fn function_symbol_matches_paraproduct() {
        let g = grid(64);
        let b = SurfaceField::from_fn(&g, |x| 1.0 + 0.3 * x[0].cos() + 0.1 * (3.0 * x[0]).sin());
        let u = SurfaceField::from_fn(&g, |x| (5.0 * x[0]).sin() + (13.0 * x[0]).cos() + (27.0 * x[0]).sin());
        let t = paradiff_apply(&SymbolField::function(&b), &u).unwrap();
        let p = super::super::paraproduct(&b, &u).unwrap();
        assert!((&t - &p).max_abs() < 1e-12);
    }

    #[test]
    fn blocks_sum_to_operator() {
        let g = grid(64);
        let b = SurfaceField::from_fn(&g, |x| 1.0 + 0.3 * x[0].cos());
        let a = SymbolField::function(&b).product(&SymbolField::abs_xi(&g));
        let u = SurfaceField::from_fn(&g, |x| (7.0 * x[0]).sin() + (20.0 * x[0]).cos());
        let total = paradiff_apply(&a, &u).unwrap();
        let mut sum = SurfaceField::zeros(&g);
        for k in 0..=max_block(&g) {
            sum = &sum + &paradiff_block(&a, &u, k).unwrap();
        }
        assert!((&total - &sum).max_abs() < 1e-11);
    }

    #[test]
    fn seminorm_examples() {
        let g = grid(32);
        let one = SymbolField::multiplier(&g, 0.0, |_| Complex64::new(1.0, 0.0));
        assert!((symbol_seminorm(&one, 0.0).unwrap().value - 1.0).abs() < 1e-9);
        let b = SurfaceField::from_fn(&g, |x| 2.0 + x[0].sin());
        let sb = symbol_seminorm(&SymbolField::function(&b), 1.0).unwrap().value;
        assert!((sb - 4.0).abs() < 1e-3, "{sb}");
        let s = symbol_seminorm(&SymbolField::abs_xi(&g), 0.0).unwrap().value;
        assert!(s <= 2f64.powf(1.5) && s > 0.9, "{s}");
    }

    #[test]
    fn commutator_vanishes_for_multipliers() {
        let g = grid(64);
        let u = SurfaceField::from_fn(&g, |x| (9.0 * x[0]).cos() + (3.0 * x[0]).sin());
        let c = commutator_ds(&SymbolField::abs_xi(&g), &u, 1.5).unwrap();
        assert!(c.max_abs() < 1e-10);
        let b = SurfaceField::from_fn(&g, |x| 1.0 + 0.2 * x[0].cos());
        let c0 = commutator_ds(&SymbolField::function(&b), &u, 0.0).unwrap();
        assert!(c0.max_abs() < 1e-13);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((loglog_slope(&x, &y) - 1.5).abs() < 1e-12);
    }
}
