use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::spectral::{fft, GridSpec, SurfaceField};

type Kernel = Arc<dyn Fn(&[f64], [f64; 2]) -> Complex64 + Send + Sync>;

/// Column spectra are cached only while `points²` stays below this size.
const CACHE_LIMIT: usize = 1 << 22;

/// Symbol `a(x, ξ)` of order `m`, evaluated pointwise from a few
/// `x`-dependent parameter fields and a closed-form kernel in `ξ`.
///
/// Keeping the kernel analytic in `ξ` lets the seminorms difference in `ξ`
/// off the lattice, and keeps memory at `O(params · N^d)`.
#[derive(Clone)]
pub struct SymbolField {
    grid: GridSpec,
    order: f64,
    params: Vec<SurfaceField>,
    kernel: Kernel,
    cache: Arc<Mutex<HashMap<usize, Arc<Vec<Complex64>>>>>,
}

impl fmt::Debug for SymbolField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolField")
            .field("order", &self.order)
            .field("params", &self.params.len())
            .finish()
    }
}

impl SymbolField {
    pub fn new(
        grid: &GridSpec,
        order: f64,
        params: Vec<SurfaceField>,
        kernel: impl Fn(&[f64], [f64; 2]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        SymbolField {
            grid: *grid,
            order,
            params,
            kernel: Arc::new(kernel),
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// `x`-independent symbol, i.e. a Fourier multiplier.
    pub fn multiplier(
        grid: &GridSpec,
        order: f64,
        m: impl Fn([f64; 2]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(grid, order, Vec::new(), move |_, xi| m(xi))
    }

    /// Order-0 symbol `b(x)`.
    pub fn function(b: &SurfaceField) -> Self {
        Self::new(b.grid(), 0.0, vec![b.clone()], |p, _| Complex64::new(p[0], 0.0))
    }

    /// `|ξ|`.
    pub fn abs_xi(grid: &GridSpec) -> Self {
        Self::multiplier(grid, 1.0, |xi| Complex64::new((xi[0] * xi[0] + xi[1] * xi[1]).sqrt(), 0.0))
    }

    /// `⟨ξ⟩^s`.
    pub fn japanese(grid: &GridSpec, s: f64) -> Self {
        Self::multiplier(grid, s, move |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s / 2.0), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn params(&self) -> &[SurfaceField] {
        &self.params
    }

    pub fn is_x_independent(&self) -> bool {
        self.params.is_empty()
    }

    /// Value at grid point `ix` and arbitrary frequency `xi`.
    pub fn eval(&self, ix: usize, xi: [f64; 2]) -> Complex64 {
        let mut p = [0.0f64; 16];
        let np = self.params.len();
        assert!(np <= p.len(), "too many symbol parameters");
        for (slot, f) in p.iter_mut().zip(&self.params) {
            *slot = f.values()[ix];
        }
        (self.kernel)(&p[..np], xi)
    }

    /// `a(·, ξ)` sampled on the grid.
    pub fn column(&self, xi: [f64; 2]) -> Vec<Complex64> {
        if self.is_x_independent() {
            let v = (self.kernel)(&[], xi);
            return vec![v; self.grid.points()];
        }
        (0..self.grid.points()).map(|i| self.eval(i, xi)).collect()
    }

    /// `x`-spectrum of the column at lattice mode `mode`.
    pub(crate) fn column_spectrum(&self, mode: usize) -> Arc<Vec<Complex64>> {
        let cacheable = self.grid.points().saturating_mul(self.grid.points()) <= CACHE_LIMIT;
        if cacheable {
            if let Some(c) = self.cache.lock().expect("symbol cache").get(&mode) {
                return c.clone();
            }
        }
        let spec = Arc::new(fft::forward_complex(&self.grid, &self.column(self.grid.xi(mode))));
        if cacheable {
            self.cache.lock().expect("symbol cache").insert(mode, spec.clone());
        }
        spec
    }

    /// Pointwise product; orders add.
    pub fn product(&self, other: &SymbolField) -> SymbolField {
        let split = self.params.len();
        let (ka, kb) = (self.kernel.clone(), other.kernel.clone());
        let mut params = self.params.clone();
        params.extend(other.params.iter().cloned());
        SymbolField::new(&self.grid, self.order + other.order, params, move |p, xi| {
            ka(&p[..split], xi) * kb(&p[split..], xi)
        })
    }

    /// Pointwise sum; the order is the larger of the two.
    pub fn sum(&self, other: &SymbolField) -> SymbolField {
        let split = self.params.len();
        let (ka, kb) = (self.kernel.clone(), other.kernel.clone());
        let mut params = self.params.clone();
        params.extend(other.params.iter().cloned());
        SymbolField::new(&self.grid, self.order.max(other.order), params, move |p, xi| {
            ka(&p[..split], xi) + kb(&p[split..], xi)
        })
    }

    pub fn scale(&self, c: f64) -> SymbolField {
        self.map(self.order, move |v| v * c)
    }

    /// Apply `f` to every value, declaring the order of the result.
    pub fn map(&self, order: f64, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> SymbolField {
        let k = self.kernel.clone();
        SymbolField::new(&self.grid, order, self.params.clone(), move |p, xi| f(k(p, xi)))
    }

    /// Principal square root; the order halves.
    pub fn sqrt(&self) -> SymbolField {
        self.map(self.order / 2.0, |v| v.sqrt())
    }

    /// `min Re a(x, ξ) / w(ξ)` over grid points and lattice modes with `w(ξ) > 0`.
    pub fn min_real_part_over(&self, weight: impl Fn([f64; 2]) -> f64) -> f64 {
        let mut m = f64::INFINITY;
        for mode in 0..self.grid.points() {
            if self.grid.is_nyquist(mode) {
                continue;
            }
            let xi = self.grid.xi(mode);
            let w = weight(xi);
            if w <= 0.0 {
                continue;
            }
            for v in self.column(xi) {
                m = m.min(v.re / w);
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.grid.points()).all(|mode| self.column(self.grid.xi(mode)).iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_sqrt() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let b = SurfaceField::from_fn(&g, |x| 2.0 + x[0].cos());
        let a = SymbolField::function(&b).product(&SymbolField::abs_xi(&g));
        assert_eq!(a.order(), 1.0);
        let v = a.eval(3, [4.0, 0.0]);
        assert!((v.re - 4.0 * b.values()[3]).abs() < 1e-14);
        let r = a.sqrt().eval(3, [4.0, 0.0]);
        assert!((r.re - (4.0 * b.values()[3]).sqrt()).abs() < 1e-14);
        assert_eq!(a.sqrt().order(), 0.5);
    }

    #[test]
    fn min_real_part() {
        let g = GridSpec::new(1, 16, 9).unwrap();
        let a = SymbolField::abs_xi(&g).scale(3.0);
        let c = a.min_real_part_over(|xi| xi[0].abs());
        assert!((c - 3.0).abs() < 1e-14);
    }
}
