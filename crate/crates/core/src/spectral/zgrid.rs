//! Vertical discretization of the flattened interval `[-1, 0]`.
//!
//! Levels are the Chebyshev–Gauss–Lobatto points mapped to `[-1, 0]` in
//! ascending order, so level 0 is the bottom `z = -1` and level `nz - 1` the
//! surface `z = 0`. With `nz` odd the midpoint `z = -1/2` is a level as well.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

#[derive(Debug)]
pub struct ZGrid {
    pub nodes: Vec<f64>,
    /// First-derivative collocation matrix.
    pub diff: DMatrix<f64>,
    /// Second-derivative collocation matrix.
    pub diff2: DMatrix<f64>,
    /// Clenshaw–Curtis quadrature weights on `[-1, 0]`.
    pub weights: Vec<f64>,
    bary: Vec<f64>,
}

impl ZGrid {
    pub fn new(nz: usize) -> Self {
        assert!(nz >= 3 && nz % 2 == 1, "nz must be odd");
        let n = nz - 1;
        let nodes: Vec<f64> = (0..nz)
            .map(|j| {
                // z_j = (-cos(πj/n) - 1) / 2, pinned exactly at the ends and the midpoint
                if j == 0 {
                    -1.0
                } else if j == n {
                    0.0
                } else if 2 * j == n {
                    -0.5
                } else {
                    (-(PI * j as f64 / n as f64).cos() - 1.0) / 2.0
                }
            })
            .collect();
        let bary: Vec<f64> = (0..nz)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let mut diff = DMatrix::<f64>::zeros(nz, nz);
        for i in 0..nz {
            let mut row_sum = 0.0;
            for j in 0..nz {
                if i != j {
                    let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                    diff[(i, j)] = v;
                    row_sum += v;
                }
            }
            diff[(i, i)] = -row_sum;
        }
        let diff2 = &diff * &diff;
        let weights = clenshaw_curtis(nz).into_iter().map(|w| 0.5 * w).collect();
        ZGrid { nodes, diff, diff2, weights, bary }
    }

    /// Process-wide shared grid for a given level count.
    pub fn shared(nz: usize) -> Arc<ZGrid> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ZGrid>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("zgrid cache poisoned");
        map.entry(nz).or_insert_with(|| Arc::new(ZGrid::new(nz))).clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Level index of `z = -1/2`.
    pub fn middle(&self) -> usize {
        self.top() / 2
    }

    /// Barycentric interpolation of column samples at an arbitrary `z ∈ [-1, 0]`.
    pub fn interpolate(&self, column: &[f64], z: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&zj, &fj)) in self.nodes.iter().zip(column).enumerate() {
            let d = z - zj;
            if d == 0.0 {
                return fj;
            }
            let w = self.bary[j] / d;
            num += w * fj;
            den += w;
        }
        num / den
    }

    /// Barycentric interpolation on nodes affinely mapped onto `[lo, hi]`.
    pub fn interpolate_on(&self, column: &[f64], lo: f64, hi: f64, y: f64) -> f64 {
        let z = -1.0 + (y - lo) / (hi - lo);
        self.interpolate(column, z)
    }

    /// Derivative of a column by collocation.
    pub fn differentiate(&self, column: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.diff[(i, j)] * column[j]).sum()).collect()
    }

    pub fn integrate(&self, column: &[f64]) -> f64 {
        self.weights.iter().zip(column).map(|(w, f)| w * f).sum()
    }
}

/// Clenshaw–Curtis weights on `[-1, 1]` for `n` Lobatto points (descending nodes;
/// the weights are symmetric so ordering does not matter).
fn clenshaw_curtis(npts: usize) -> Vec<f64> {
    let n = npts - 1;
    let nf = n as f64;
    let mut w = vec![0.0; npts];
    let theta: Vec<f64> = (0..npts).map(|j| PI * j as f64 / nf).collect();
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for i in 1..n {
            let mut v = 1.0;
            for k in 1..n / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
            v -= (nf * theta[i]).cos() / (nf * nf - 1.0);
            w[i] = 2.0 * v / nf;
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for i in 1..n {
            let mut v = 1.0;
            for k in 1..=(n - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
            w[i] = 2.0 * v / nf;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_breakpoints() {
        let z = ZGrid::new(17);
        assert_eq!(z.nodes[0], -1.0);
        assert_eq!(z.nodes[8], -0.5);
        assert_eq!(z.nodes[16], 0.0);
        assert!(z.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn differentiation_is_spectral() {
        let z = ZGrid::new(33);
        let f: Vec<f64> = z.nodes.iter().map(|&s| (3.0 * s).sin() * s.exp()).collect();
        let df = z.differentiate(&f);
        for (i, &s) in z.nodes.iter().enumerate() {
            let exact = 3.0 * (3.0 * s).cos() * s.exp() + (3.0 * s).sin() * s.exp();
            assert!((df[i] - exact).abs() < 1e-11, "{} vs {}", df[i], exact);
        }
    }

    #[test]
    fn quadrature_and_interpolation() {
        let z = ZGrid::new(17);
        let f: Vec<f64> = z.nodes.iter().map(|&s| (2.0 * s).exp()).collect();
        let exact = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((z.integrate(&f) - exact).abs() < 1e-13);
        let v = z.interpolate(&f, -0.3);
        assert!((v - (-0.6f64).exp()).abs() < 1e-12);
    }
}
