use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Discretization of the horizontal torus `[0, L)^d` and of the flattened
/// vertical interval `[-1, 0]`.
///
/// Flat indices run row-major: for `d = 2` the index is `i0 * n + i1`, with
/// axis 0 the slow one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub nz: usize,
    pub dealias_fraction: f64,
}

impl GridSpec {
    /// Grid with period `2π` and the 2/3 dealiasing rule.
    pub fn new(dim: usize, n: usize, nz: usize) -> Result<Self> {
        let grid = GridSpec { dim, n, length: 2.0 * PI, nz, dealias_fraction: 2.0 / 3.0 };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_length(mut self, length: f64) -> Result<Self> {
        self.length = length;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Result<Self> {
        self.dealias_fraction = fraction;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nz(mut self, nz: usize) -> Result<Self> {
        self.nz = nz;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension {} not in {{1, 2}}", self.dim)));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {} must be a power of two >= 8", self.n)));
        }
        if self.nz < 9 || self.nz.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("Nz = {} must be odd and >= 9", self.nz)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidGrid(format!("period {} must be positive", self.length)));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction {} not in (0, 1]",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Number of horizontal grid points, `n^d`.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of one horizontal grid cell.
    pub fn cell_measure(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn domain_measure(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Wavenumber spacing `2π / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer mode for a 1-D FFT index.
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Split a flat index into per-axis indices (unused axes are zero).
    pub fn axes(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    /// Integer modes of a flat spectral index.
    pub fn modes(&self, flat: usize) -> [i64; 2] {
        let [a, b] = self.axes(flat);
        if self.dim == 1 {
            [self.signed_mode(a), 0]
        } else {
            [self.signed_mode(a), self.signed_mode(b)]
        }
    }

    /// Wave vector `ξ` of a flat spectral index.
    pub fn xi(&self, flat: usize) -> [f64; 2] {
        let [m0, m1] = self.modes(flat);
        [m0 as f64 * self.dk(), m1 as f64 * self.dk()]
    }

    pub fn xi_norm(&self, flat: usize) -> f64 {
        let [a, b] = self.xi(flat);
        (a * a + b * b).sqrt()
    }

    /// Physical coordinates of a flat grid index.
    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.axes(flat);
        let dx = self.dx();
        if self.dim == 1 {
            [a as f64 * dx, 0.0]
        } else {
            [a as f64 * dx, b as f64 * dx]
        }
    }

    /// True when some axis sits on the unpaired Nyquist mode.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = -(self.n as i64) / 2;
        let [m0, m1] = self.modes(flat);
        m0 == half || (self.dim == 2 && m1 == half)
    }

    /// Largest retained integer mode per axis under the dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.dealias_fraction * self.n as f64 / 2.0).floor() as i64
    }

    /// Per-mode mask of the dealiasing rule (true = retained).
    pub fn dealias_mask(&self) -> Vec<bool> {
        let cut = self.dealias_cutoff();
        (0..self.points())
            .map(|i| {
                let [m0, m1] = self.modes(i);
                m0.abs() <= cut && m1.abs() <= cut && !self.is_nyquist(i)
            })
            .collect()
    }

    /// Largest `|ξ|` on a retained mode along one axis.
    pub fn max_retained_wavenumber(&self) -> f64 {
        self.dealias_cutoff() as f64 * self.dk()
    }

    /// Largest `|ξ|` on the whole spectral grid.
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.points()).map(|i| self.xi_norm(i)).fold(0.0, f64::max)
    }

    pub fn same_horizontal(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(1, 12, 17).is_err());
        assert!(GridSpec::new(1, 4, 17).is_err());
        assert!(GridSpec::new(1, 16, 16).is_err());
        assert!(GridSpec::new(3, 16, 17).is_err());
        assert!(GridSpec::new(1, 16, 17).unwrap().with_dealias_fraction(0.0).is_err());
    }

    #[test]
    fn mode_layout() {
        let g = GridSpec::new(1, 8, 9).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.modes(i)[0]).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(g.is_nyquist(4));
        assert_eq!(g.dealias_cutoff(), 2);

        let g2 = GridSpec::new(2, 8, 9).unwrap();
        assert_eq!(g2.points(), 64);
        assert_eq!(g2.modes(8 + 3), [1, 3]);
    }
}
