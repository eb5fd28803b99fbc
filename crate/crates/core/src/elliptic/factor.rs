use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use super::flat::{from_level_spectra, level_spectra, solve_flat};
use super::{correct, EllipticProblem, EllipticSolution};
use crate::error::{Error, Result};
use crate::geometry::EllipticCoefficients;
use crate::paradiff::{paradiff_apply, SymbolField};
use crate::spectral::dyadic::{bump_k, high_pass_cutoff};
use crate::spectral::{StripField, SurfaceField, ZGrid};

/// Per-level symbols of the factorization `(∂_z − T_a)(∂_z − T_A)`.
#[derive(Debug, Clone)]
pub struct FactorizationSymbols {
    /// `a = ½(−iβ·ξ − √(4α|ξ|² − (β·ξ)²))`, one per level.
    pub a: Vec<SymbolField>,
    /// `A = ½(−iβ·ξ + √(4α|ξ|² − (β·ξ)²))`, one per level.
    pub big_a: Vec<SymbolField>,
    /// Ellipticity constant `c₂`.
    pub c2: f64,
}

fn root_part(p: &[f64], xi: [f64; 2]) -> (Complex64, Complex64) {
    let alpha = p[0];
    let bxi = p[1] * xi[0] + p.get(2).copied().unwrap_or(0.0) * xi[1];
    let k2 = xi[0] * xi[0] + xi[1] * xi[1];
    let disc = (4.0 * alpha * k2 - bxi * bxi).max(0.0).sqrt();
    (Complex64::new(0.0, -0.5 * bxi), Complex64::new(0.5 * disc, 0.0))
}

pub fn factorization_symbols(coeffs: &EllipticCoefficients) -> Result<FactorizationSymbols> {
    let c2 = coeffs.ellipticity();
    if !(c2 > 0.0) {
        return Err(Error::EllipticityViolation { min: c2 });
    }
    let g = *coeffs.grid();
    let mut a = Vec::with_capacity(g.nz);
    let mut big_a = Vec::with_capacity(g.nz);
    for j in 0..g.nz {
        let mut params = vec![coeffs.alpha.level_field(j)];
        params.extend(coeffs.beta.iter().map(|b| b.level_field(j)));
        a.push(SymbolField::new(&g, 1.0, params.clone(), |p, xi| {
            let (i, r) = root_part(p, xi);
            i - r
        }));
        big_a.push(SymbolField::new(&g, 1.0, params, |p, xi| {
            let (i, r) = root_part(p, xi);
            i + r
        }));
    }
    Ok(FactorizationSymbols { a, big_a, c2 })
}

/// Marching direction in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarchDirection {
    /// `∂_z w + T_a w = F` upward from `z = -1`.
    Forward,
    /// `−∂_z w + T_a w = F` downward from `z = 0`.
    Backward,
}

/// Diagonal weight of `T_a` for an `x`-independent symbol.
fn diagonal_weight(r: f64) -> f64 {
    high_pass_cutoff(r) * (1.0 - bump_k(2, r))
}

/// `(1 − e^{−μ})/μ` and `(1 − e^{−μ}(1 + μ))/μ²`.
fn phi_functions(mu: Complex64) -> (Complex64, Complex64) {
    if mu.norm() == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0));
    }
    if mu.norm() < 0.1 {
        let mut phi1 = Complex64::new(0.0, 0.0);
        let mut psi = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 1..=14 {
            fact *= n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            // φ1 coefficient of μ^{n-1}, ψ coefficient of μ^{n-2}
            phi1 += p * (sign / fact);
            if n >= 2 {
                psi += p / mu * (-sign * (n as f64 - 1.0) / fact);
            }
            p *= mu;
        }
        (phi1, psi)
    } else {
        let e = (-mu).exp();
        ((1.0 - e) / mu, (1.0 - e * (1.0 + mu)) / (mu * mu))
    }
}

/// Solve `∂_z w + T_a w = F` (forward) or `−∂_z w + T_a w = F` (backward) with
/// `w = w₀` at the starting level.
///
/// The `x`-mean of the symbol is integrated exactly per mode; the `x`-varying
/// remainder is explicit with one predictor–corrector pass.
pub fn parabolic_march(
    symbols: &[SymbolField],
    w0: &SurfaceField,
    f: &StripField,
    direction: MarchDirection,
) -> Result<StripField> {
    let g = *w0.grid();
    let nz = f.nz();
    if symbols.len() != nz {
        return Err(Error::SizeMismatch { expected: nz, actual: symbols.len() });
    }
    let mut worst = f64::INFINITY;
    for s in symbols {
        worst = worst.min(s.min_real_part_over(|xi| (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()));
    }
    if !(worst > 0.0) {
        return Err(Error::EllipticityViolation { min: worst });
    }
    let npts = g.points();
    // diagonal multipliers m_j(ξ) = τ(ξ) · mean_x a_j(·, ξ)
    let diag: Vec<Vec<Complex64>> = symbols
        .iter()
        .map(|s| {
            (0..npts)
                .map(|mode| {
                    let col = s.column(g.xi(mode));
                    let mean = col.iter().sum::<Complex64>() / npts as f64;
                    mean * diagonal_weight(g.xi_norm(mode))
                })
                .collect()
        })
        .collect();
    let remainder = |j: usize, w: &SurfaceField| -> Result<SurfaceField> {
        if symbols[j].is_x_independent() {
            return Ok(SurfaceField::zeros(&g));
        }
        let full = paradiff_apply(&symbols[j], w)?;
        let d = &diag[j];
        let diag_part: Vec<Complex64> = w.coeffs().iter().zip(d).map(|(c, m)| c * m).collect();
        Ok(&full - &SurfaceField::from_coeffs(&g, &diag_part)?)
    };
    let zg = ZGrid::shared(nz);
    let order: Vec<usize> = match direction {
        MarchDirection::Forward => (0..nz).collect(),
        MarchDirection::Backward => (0..nz).rev().collect(),
    };
    let fh = level_spectra(f);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); npts]; nz];
    let mut w = w0.clone();
    out[order[0]] = w.coeffs().to_vec();
    for step in 0..nz - 1 {
        let (j, k) = (order[step], order[step + 1]);
        let h = (zg.nodes[k] - zg.nodes[j]).abs();
        let rj = remainder(j, &w)?;
        let gj: Vec<Complex64> = fh[j].iter().zip(rj.coeffs()).map(|(a, b)| a - b).collect();
        let advance = |gk: &[Complex64]| -> Vec<Complex64> {
            (0..npts)
                .map(|m| {
                    let mu = 0.5 * h * (diag[j][m] + diag[k][m]);
                    let (phi1, psi) = phi_functions(mu);
                    (-mu).exp() * w.coeffs()[m] + h * psi * gj[m] + h * (phi1 - psi) * gk[m]
                })
                .collect()
        };
        let predicted = SurfaceField::from_coeffs(&g, &advance(&gj))?;
        let rk = remainder(k, &predicted)?;
        let gk: Vec<Complex64> = fh[k].iter().zip(rk.coeffs()).map(|(a, b)| a - b).collect();
        let next = SurfaceField::from_coeffs(&g, &advance(&gk))?;
        let before = w.l2_norm() + h * (f.level_field(j).l2_norm() + f.level_field(k).l2_norm());
        let after = next.l2_norm();
        if !after.is_finite() || after > 10.0 * before + f64::MIN_POSITIVE {
            return Err(Error::Instability { level: k, growth: after / before });
        }
        out[k] = next.coeffs().to_vec();
        w = next;
    }
    Ok(from_level_spectra(&g, &out))
}

/// Per-mode factored preconditioner built from the `x`-mean symbols.
struct FactoredPreconditioner {
    nz: usize,
    neumann: bool,
    /// `D − ā` with the bottom row replaced by `w(−1) = c`.
    lower: Vec<LU<Complex64, Dyn, Dyn>>,
    /// `D − Ā` with the top row replaced by `δ(0) = data`.
    upper: Vec<LU<Complex64, Dyn, Dyn>>,
    /// Homogeneous response `δ_h` and its bottom functional.
    homogeneous: Vec<(DVector<Complex64>, Complex64)>,
    diff_row0: Vec<f64>,
}

impl FactoredPreconditioner {
    fn new(symbols: &FactorizationSymbols, neumann: bool) -> Self {
        let g = *symbols.a[0].grid();
        let nz = symbols.a.len();
        let zg = ZGrid::shared(nz);
        let npts = g.points();
        // the Nyquist mode carries no horizontal derivative, as in `laplacian_x`
        let xi = |mode: usize| if g.is_nyquist(mode) { [0.0, 0.0] } else { g.xi(mode) };
        let mean = |s: &SymbolField, mode: usize| s.column(xi(mode)).iter().sum::<Complex64>() / npts as f64;
        let d: DMatrix<Complex64> = zg.diff.map(|v| Complex64::new(v, 0.0));
        let diff_row0: Vec<f64> = (0..nz).map(|j| zg.diff[(0, j)]).collect();
        let mut lower = Vec::with_capacity(npts);
        let mut upper = Vec::with_capacity(npts);
        let mut homogeneous = Vec::with_capacity(npts);
        for mode in 0..npts {
            let abar: Vec<Complex64> = symbols.a.iter().map(|s| mean(s, mode)).collect();
            let big: Vec<Complex64> = symbols.big_a.iter().map(|s| mean(s, mode)).collect();
            let mut m1 = d.clone();
            let mut m2 = d.clone();
            for j in 0..nz {
                m1[(j, j)] -= abar[j];
                m2[(j, j)] -= big[j];
            }
            for j in 0..nz {
                m1[(0, j)] = Complex64::new(if j == 0 { 1.0 } else { 0.0 }, 0.0);
                m2[(nz - 1, j)] = Complex64::new(if j == nz - 1 { 1.0 } else { 0.0 }, 0.0);
            }
            let l1 = m1.lu();
            let l2 = m2.lu();
            let mut e0 = DVector::<Complex64>::zeros(nz);
            e0[0] = Complex64::new(1.0, 0.0);
            let mut wh = l1.solve(&e0).expect("lower factor invertible");
            wh[nz - 1] = Complex64::new(0.0, 0.0);
            let dh = l2.solve(&wh).expect("upper factor invertible");
            let functional = if neumann { Self::bottom_slope(&diff_row0, &dh) } else { dh[0] };
            lower.push(l1);
            upper.push(l2);
            homogeneous.push((dh, functional));
        }
        FactoredPreconditioner { nz, neumann, lower, upper, homogeneous, diff_row0 }
    }

    fn bottom_slope(row: &[f64], v: &DVector<Complex64>) -> Complex64 {
        row.iter().zip(v.iter()).map(|(d, x)| x * *d).sum()
    }

    /// Approximate solve of `L δ = r` with zero boundary data.
    fn apply(&self, r: &StripField) -> StripField {
        let g = *r.grid();
        let nz = self.nz;
        let rh = level_spectra(r);
        let mut out = vec![vec![Complex64::new(0.0, 0.0); g.points()]; nz];
        for mode in 0..g.points() {
            let mut rhs = DVector::<Complex64>::from_iterator(nz, (0..nz).map(|j| rh[j][mode]));
            rhs[0] = Complex64::new(0.0, 0.0);
            let mut w = self.lower[mode].solve(&rhs).expect("lower factor invertible");
            w[nz - 1] = Complex64::new(0.0, 0.0);
            let dp = self.upper[mode].solve(&w).expect("upper factor invertible");
            let (dh, functional) = &self.homogeneous[mode];
            let current = if self.neumann { Self::bottom_slope(&self.diff_row0, &dp) } else { dp[0] };
            let c = if functional.norm() > 0.0 { -current / functional } else { Complex64::new(0.0, 0.0) };
            for j in 0..nz {
                out[j][mode] = dp[j] + c * dh[j];
            }
        }
        from_level_spectra(&g, &out)
    }
}

/// Residual correction with the decoupled factorization as preconditioner,
/// seeded from the constant-coefficient solve.
pub fn solve_factored(problem: &EllipticProblem) -> Result<EllipticSolution> {
    problem.validate()?;
    let v = solve_flat(&problem.f0, &problem.top, &problem.bottom);
    let symbols = factorization_symbols(&problem.coeffs)?;
    let pre = FactoredPreconditioner::new(&symbols, problem.bottom.is_neumann());
    correct(problem, v, |r| Ok(pre.apply(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn flat_symbols() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let s = factorization_symbols(&EllipticCoefficients::flat(&g)).unwrap();
        let v = s.a[3].eval(2, [5.0, 0.0]);
        assert_eq!(v, Complex64::new(-5.0, 0.0));
        assert_eq!(s.big_a[3].eval(2, [5.0, 0.0]), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn non_elliptic_rejected() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let mut c = EllipticCoefficients::flat(&g);
        c.beta[0] = c.beta[0].map(|_| 3.0);
        assert!(matches!(factorization_symbols(&c), Err(Error::EllipticityViolation { .. })));
    }

    #[test]
    fn phi_series_matches_closed_form() {
        for mu in [Complex64::new(0.09, 0.02), Complex64::new(-0.05, 0.08)] {
            let (p1, ps) = phi_functions(mu);
            let e = (-mu).exp();
            assert!((p1 - (1.0 - e) / mu).norm() < 1e-12);
            assert!((ps - (1.0 - e * (1.0 + mu)) / (mu * mu)).norm() < 1e-9);
        }
    }

    #[test]
    fn march_decays_exactly_for_abs_xi() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let syms: Vec<SymbolField> = (0..g.nz).map(|_| SymbolField::abs_xi(&g)).collect();
        let w0 = SurfaceField::from_fn(&g, |x| (8.0 * x[0]).cos());
        let w = parabolic_march(&syms, &w0, &StripField::zeros(&g), MarchDirection::Forward).unwrap();
        let exact = StripField::from_fn(&g, |x, z| (-8.0 * (z + 1.0)).exp() * (8.0 * x[0]).cos());
        assert!(w.sub(&exact).max_abs() < 1e-13);
        let back = parabolic_march(&syms, &w0, &StripField::zeros(&g), MarchDirection::Backward).unwrap();
        let exact = StripField::from_fn(&g, |x, z| (8.0 * z).exp() * (8.0 * x[0]).cos());
        assert!(back.sub(&exact).max_abs() < 1e-13);
    }

    #[test]
    fn march_variation_of_constants() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let syms: Vec<SymbolField> = (0..g.nz).map(|_| SymbolField::abs_xi(&g)).collect();
        let f = StripField::from_fn(&g, |x, _| (8.0 * x[0]).cos());
        let w = parabolic_march(&syms, &SurfaceField::zeros(&g), &f, MarchDirection::Forward).unwrap();
        let exact = StripField::from_fn(&g, |x, z| (1.0 - (-8.0 * (z + 1.0)).exp()) / 8.0 * (8.0 * x[0]).cos());
        assert!(w.sub(&exact).max_abs() < 1e-13);
        let zero = parabolic_march(&syms, &SurfaceField::zeros(&g), &StripField::zeros(&g), MarchDirection::Forward).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }
}
