use std::sync::Arc;

use super::field::SurfaceField;
use super::grid::GridSpec;
use super::zgrid::ZGrid;
use crate::error::{Error, Result};

/// Field on the flat strip `T^d × [-1, 0]`: spectral in `x`, collocated in `z`.
///
/// Samples are stored level-major: level `j` occupies
/// `values[j * npts .. (j + 1) * npts]`.
#[derive(Debug, Clone)]
pub struct StripField {
    grid: GridSpec,
    zgrid: Arc<ZGrid>,
    values: Vec<f64>,
}

impl PartialEq for StripField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl StripField {
    pub fn zeros(grid: &GridSpec) -> Self {
        StripField { grid: *grid, zgrid: ZGrid::shared(grid.nz), values: vec![0.0; grid.points() * grid.nz] }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        let expected = grid.points() * grid.nz;
        if values.len() != expected {
            return Err(Error::SizeMismatch { expected, actual: values.len() });
        }
        Ok(StripField { grid: *grid, zgrid: ZGrid::shared(grid.nz), values })
    }

    /// Sample `f(x, z)` on every level.
    pub fn from_fn(grid: &GridSpec, f: impl Fn([f64; 2], f64) -> f64) -> Self {
        let zgrid = ZGrid::shared(grid.nz);
        let npts = grid.points();
        let mut values = Vec::with_capacity(npts * grid.nz);
        for &z in &zgrid.nodes {
            values.extend((0..npts).map(|i| f(grid.coords(i), z)));
        }
        StripField { grid: *grid, zgrid, values }
    }

    /// Build level by level.
    pub fn from_levels(grid: &GridSpec, levels: impl IntoIterator<Item = SurfaceField>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.points() * grid.nz);
        for lvl in levels {
            values.extend_from_slice(lvl.values());
        }
        Self::from_values(grid, values)
    }

    /// The same surface field repeated on every level.
    pub fn extruded(f: &SurfaceField) -> Self {
        let g = *f.grid();
        let mut values = Vec::with_capacity(g.points() * g.nz);
        for _ in 0..g.nz {
            values.extend_from_slice(f.values());
        }
        StripField { grid: g, zgrid: ZGrid::shared(g.nz), values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn zgrid(&self) -> &ZGrid {
        &self.zgrid
    }

    pub fn nz(&self) -> usize {
        self.grid.nz
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn level(&self, j: usize) -> &[f64] {
        let n = self.grid.points();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.grid.points();
        &mut self.values[j * n..(j + 1) * n]
    }

    pub fn level_field(&self, j: usize) -> SurfaceField {
        SurfaceField::from_values(&self.grid, self.level(j).to_vec()).expect("level size")
    }

    pub fn set_level(&mut self, j: usize, f: &SurfaceField) {
        self.level_mut(j).copy_from_slice(f.values());
    }

    pub fn top(&self) -> SurfaceField {
        self.level_field(self.nz() - 1)
    }

    pub fn bottom(&self) -> SurfaceField {
        self.level_field(0)
    }

    /// Samples of one vertical column.
    pub fn column(&self, i: usize) -> Vec<f64> {
        let n = self.grid.points();
        (0..self.nz()).map(|j| self.values[j * n + i]).collect()
    }

    pub fn set_column(&mut self, i: usize, column: &[f64]) {
        let n = self.grid.points();
        for (j, &v) in column.iter().enumerate() {
            self.values[j * n + i] = v;
        }
    }

    pub fn map_levels(&self, f: impl Fn(&SurfaceField) -> SurfaceField) -> Self {
        let levels = (0..self.nz()).map(|j| f(&self.level_field(j)));
        Self::from_levels(&self.grid, levels).expect("level sizes")
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        StripField { grid: self.grid, zgrid: self.zgrid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &StripField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        StripField {
            grid: self.grid,
            zgrid: self.zgrid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &StripField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StripField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn product(&self, other: &StripField) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &StripField) -> Self {
        self.zip_map(other, |a, b| a + c * b)
    }

    /// Level-wise dealiased product.
    pub fn dealiased_product(&self, other: &StripField) -> Self {
        let levels =
            (0..self.nz()).map(|j| self.level_field(j).dealiased_product(&other.level_field(j)));
        Self::from_levels(&self.grid, levels).expect("level sizes")
    }

    /// `∂_z` by collocation.
    pub fn dz(&self) -> Self {
        self.apply_z_matrix(&self.zgrid.diff)
    }

    /// `∂_z²` by collocation.
    pub fn dzz(&self) -> Self {
        self.apply_z_matrix(&self.zgrid.diff2)
    }

    fn apply_z_matrix(&self, m: &nalgebra::DMatrix<f64>) -> Self {
        let n = self.grid.points();
        let nz = self.nz();
        let mut out = vec![0.0; n * nz];
        for r in 0..nz {
            let dst = &mut out[r * n..(r + 1) * n];
            for c in 0..nz {
                let w = m[(r, c)];
                if w == 0.0 {
                    continue;
                }
                let src = &self.values[c * n..(c + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        StripField { grid: self.grid, zgrid: self.zgrid.clone(), values: out }
    }

    /// Spectral `∂_{x_axis}` on every level.
    pub fn dx(&self, axis: usize) -> Self {
        self.map_levels(|f| f.derivative(axis))
    }

    pub fn gradient_x(&self) -> Vec<StripField> {
        (0..self.grid.dim).map(|k| self.dx(k)).collect()
    }

    pub fn laplacian_x(&self) -> Self {
        self.map_levels(|f| f.laplacian())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫∫ f g dx dz` over the flat strip.
    pub fn inner(&self, other: &StripField) -> f64 {
        let n = self.grid.points();
        let mut total = 0.0;
        for (j, w) in self.zgrid.weights.iter().enumerate() {
            let a = &self.values[j * n..(j + 1) * n];
            let b = &other.values[j * n..(j + 1) * n];
            total += w * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        }
        total * self.grid.cell_measure()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `∫∫ f dx dz`.
    pub fn integral(&self) -> f64 {
        let n = self.grid.points();
        let mut total = 0.0;
        for (j, w) in self.zgrid.weights.iter().enumerate() {
            total += w * self.values[j * n..(j + 1) * n].iter().sum::<f64>();
        }
        total * self.grid.cell_measure()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
