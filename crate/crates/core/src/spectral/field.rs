use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Real periodic field on the horizontal torus, with its spectrum computed
/// on first use and kept until the samples change.
#[derive(Debug)]
pub struct SurfaceField {
    grid: GridSpec,
    values: Vec<f64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl Clone for SurfaceField {
    fn clone(&self) -> Self {
        let coeffs = OnceLock::new();
        if let Some(c) = self.coeffs.get() {
            let _ = coeffs.set(c.clone());
        }
        SurfaceField { grid: self.grid, values: self.values.clone(), coeffs }
    }
}

impl PartialEq for SurfaceField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl SurfaceField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        SurfaceField { grid: *grid, values: vec![c; grid.points()], coeffs: OnceLock::new() }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::SizeMismatch { expected: grid.points(), actual: values.len() });
        }
        Ok(SurfaceField { grid: *grid, values, coeffs: OnceLock::new() })
    }

    /// Sample `f(x)` on the grid; `x[1]` is zero when `d = 1`.
    pub fn from_fn(grid: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.points()).map(|i| f(grid.coords(i))).collect();
        SurfaceField { grid: *grid, values, coeffs: OnceLock::new() }
    }

    /// Build from spectral coefficients, keeping the real part of the inverse.
    pub fn from_coeffs(grid: &GridSpec, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::SizeMismatch { expected: grid.points(), actual: coeffs.len() });
        }
        Ok(SurfaceField {
            grid: *grid,
            values: fft::inverse_real(grid, coeffs),
            coeffs: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable samples; drops the cached spectrum.
    pub fn values_mut(&mut self) -> &mut [f64] {
        self.coeffs = OnceLock::new();
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| fft::forward(&self.grid, &self.values))
    }

    pub fn check_grid(&self, other: &SurfaceField) -> Result<()> {
        if self.grid.same_horizontal(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SurfaceField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            coeffs: OnceLock::new(),
        }
    }

    pub fn zip_map(&self, other: &SurfaceField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        SurfaceField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            coeffs: OnceLock::new(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise product on the grid (no dealiasing).
    pub fn product(&self, other: &SurfaceField) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Pointwise product with both factors truncated by the dealiasing rule.
    pub fn dealiased_product(&self, other: &SurfaceField) -> Self {
        self.dealiased().product(&other.dealiased()).dealiased()
    }

    /// Truncate to the modes retained by the dealiasing rule.
    pub fn dealiased(&self) -> Self {
        let mask = self.grid.dealias_mask();
        let c: Vec<Complex64> = self
            .coeffs()
            .iter()
            .zip(&mask)
            .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::from_coeffs(&self.grid, &c).expect("same grid")
    }

    /// Apply a real Fourier multiplier `m(ξ)`.
    pub fn apply_multiplier(&self, m: impl Fn([f64; 2]) -> f64) -> Self {
        let c: Vec<Complex64> = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(self.grid.xi(i)))
            .collect();
        Self::from_coeffs(&self.grid, &c).expect("same grid")
    }

    /// Apply a complex Fourier multiplier; the symbol must be Hermitian
    /// (`m(-ξ) = conj m(ξ)`) for the result to be real.
    pub fn apply_complex_multiplier(&self, m: impl Fn([f64; 2]) -> Complex64) -> Self {
        let c: Vec<Complex64> = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| if self.grid.is_nyquist(i) { Complex64::new(0.0, 0.0) } else { c * m(self.grid.xi(i)) })
            .collect();
        Self::from_coeffs(&self.grid, &c).expect("same grid")
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < self.grid.dim, "axis {axis} out of range");
        self.apply_complex_multiplier(|xi| Complex64::new(0.0, xi[axis]))
    }

    pub fn gradient(&self) -> Vec<SurfaceField> {
        (0..self.grid.dim).map(|k| self.derivative(k)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let g = self.grid;
        let c: Vec<Complex64> = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = g.xi_norm(i);
                if g.is_nyquist(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    -c * (k * k)
                }
            })
            .collect();
        Self::from_coeffs(&g, &c).expect("same grid")
    }

    /// `|D|` multiplier.
    pub fn abs_derivative(&self) -> Self {
        self.apply_multiplier(|xi| (xi[0] * xi[0] + xi[1] * xi[1]).sqrt())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ u v dx` by the (spectrally exact) rectangle rule.
    pub fn inner(&self, other: &SurfaceField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_measure()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.grid.cell_measure()).powf(1.0 / p)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }
}

/// `Σ_i a_i b_i` for vector fields stored componentwise.
pub fn dot(a: &[SurfaceField], b: &[SurfaceField]) -> SurfaceField {
    assert_eq!(a.len(), b.len());
    let mut out = SurfaceField::zeros(a[0].grid());
    for (x, y) in a.iter().zip(b) {
        out = &out + &x.product(y);
    }
    out
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &[SurfaceField]) -> SurfaceField {
    let mut out = SurfaceField::zeros(v[0].grid());
    for (axis, c) in v.iter().enumerate() {
        out = &out + &c.derivative(axis);
    }
    out
}

impl Add for &SurfaceField {
    type Output = SurfaceField;
    fn add(self, rhs: &SurfaceField) -> SurfaceField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &SurfaceField {
    type Output = SurfaceField;
    fn sub(self, rhs: &SurfaceField) -> SurfaceField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SurfaceField {
    type Output = SurfaceField;
    fn mul(self, rhs: f64) -> SurfaceField {
        self.scale(rhs)
    }
}

impl Neg for &SurfaceField {
    type Output = SurfaceField;
    fn neg(self) -> SurfaceField {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(1, n, 9).unwrap()
    }

    #[test]
    fn cosine_has_two_half_modes() {
        let g = grid(64);
        let u = SurfaceField::from_fn(&g, |x| x[0].cos());
        let c = u.coeffs();
        for (i, z) in c.iter().enumerate() {
            let m = g.modes(i)[0];
            if m.abs() == 1 {
                assert!((z.re - 0.5).abs() < 1e-15 && z.im.abs() < 1e-15);
            } else {
                assert!(z.norm() < 1e-15, "mode {m} = {z}");
            }
        }
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = grid(32);
        let u = SurfaceField::constant(&g, 3.0);
        let c = u.coeffs();
        assert!((c[0].re - 3.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1, 2] {
            let g = GridSpec::new(dim, 32, 9).unwrap();
            let vals: Vec<f64> = (0..g.points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = SurfaceField::from_values(&g, vals.clone()).unwrap();
            let back = SurfaceField::from_coeffs(&g, u.coeffs()).unwrap();
            let err = back.values().iter().zip(&vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(err <= 1e-13 * scale, "dim {dim}: {err}");
        }
    }

    #[test]
    fn size_mismatch_is_reported() {
        let g = grid(16);
        assert!(matches!(
            SurfaceField::from_values(&g, vec![0.0; 15]),
            Err(Error::SizeMismatch { expected: 16, actual: 15 })
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let g = GridSpec::new(2, 16, 9).unwrap();
        let u = SurfaceField::from_fn(&g, |x| (2.0 * x[0]).sin() * x[1].cos());
        let ux = u.derivative(0);
        let uy = u.derivative(1);
        for i in 0..g.points() {
            let x = g.coords(i);
            assert!((ux.values()[i] - 2.0 * (2.0 * x[0]).cos() * x[1].cos()).abs() < 1e-12);
            assert!((uy.values()[i] + (2.0 * x[0]).sin() * x[1].sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn mutation_invalidates_spectrum() {
        let g = grid(16);
        let mut u = SurfaceField::zeros(&g);
        assert_eq!(u.coeffs()[0].re, 0.0);
        u.values_mut().iter_mut().for_each(|v| *v = 2.0);
        assert!((u.coeffs()[0].re - 2.0).abs() < 1e-15);
    }
}
