//! Normalized forward/inverse transforms on the periodic grid.
//!
//! Convention: `û_m = N^{-d} Σ_j u_j e^{-i ξ_m·x_j}` and `u_j = Σ_m û_m e^{i ξ_m·x_j}`,
//! so `cos(x)` has coefficient `1/2` on modes `±1`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform_in_place(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.n;
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    if grid.dim == 1 {
        fft.process(data);
        return;
    }
    // rows (axis 1, contiguous)
    fft.process(data);
    // columns (axis 0)
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = data[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            data[i * n + j] = column[i];
        }
    }
}

pub fn forward(grid: &GridSpec, values: &[f64]) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), grid.points());
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_in_place(grid, &mut data, FftDirection::Forward);
    let scale = 1.0 / grid.points() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

pub fn forward_complex(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    transform_in_place(grid, &mut data, FftDirection::Forward);
    let scale = 1.0 / grid.points() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

pub fn inverse(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(coeffs.len(), grid.points());
    let mut data = coeffs.to_vec();
    transform_in_place(grid, &mut data, FftDirection::Inverse);
    data
}

/// Inverse transform keeping the real part (exact for Hermitian input).
pub fn inverse_real(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<f64> {
    inverse(grid, coeffs).into_iter().map(|c| c.re).collect()
}
