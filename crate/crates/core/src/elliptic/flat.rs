use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, Dyn, LU};
use num_complex::Complex64;

use super::BottomCondition;
use crate::spectral::{GridSpec, StripField, SurfaceField, ZGrid};

type Factor = Arc<LU<f64, Dyn, Dyn>>;
type FactorCache = Mutex<HashMap<(usize, u64, bool), Factor>>;

const CACHE_CAPACITY: usize = 8192;

/// LU of `D² − k²` with the boundary rows for the requested bottom kind.
fn factor(nz: usize, k2: f64, neumann: bool) -> Factor {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (nz, k2.to_bits(), neumann);
    if let Some(f) = cache.lock().expect("flat solver cache").get(&key) {
        return f.clone();
    }
    let zg = ZGrid::shared(nz);
    let mut m: DMatrix<f64> = zg.diff2.clone();
    for i in 0..nz {
        m[(i, i)] -= k2;
    }
    let top = nz - 1;
    for j in 0..nz {
        m[(top, j)] = if j == top { 1.0 } else { 0.0 };
        m[(0, j)] = if neumann { zg.diff[(0, j)] } else if j == 0 { 1.0 } else { 0.0 };
    }
    let lu = Arc::new(m.lu());
    let mut map = cache.lock().expect("flat solver cache");
    if map.len() >= CACHE_CAPACITY {
        map.clear();
    }
    map.insert(key, lu.clone());
    lu
}

/// Spectra of every level, level-major.
pub(crate) fn level_spectra(f: &StripField) -> Vec<Vec<Complex64>> {
    (0..f.nz()).map(|j| f.level_field(j).coeffs().to_vec()).collect()
}

pub(crate) fn from_level_spectra(grid: &GridSpec, spectra: &[Vec<Complex64>]) -> StripField {
    let levels = spectra.iter().map(|c| SurfaceField::from_coeffs(grid, c).expect("same grid"));
    StripField::from_levels(grid, levels).expect("level sizes")
}

/// Exact per-mode solve of `∂_z² v − |ξ|² v = F₀` with `v(0) = f` and the bottom condition.
pub fn solve_flat(f0: &StripField, top: &SurfaceField, bottom: &BottomCondition) -> StripField {
    let g = *f0.grid();
    let nz = f0.nz();
    let npts = g.points();
    let fh = level_spectra(f0);
    let th = top.coeffs();
    let bh = bottom.data().coeffs();
    let neumann = bottom.is_neumann();

    let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
    for mode in 0..npts {
        // matches `laplacian_x`, which drops the Nyquist mode
        let k = if g.is_nyquist(mode) { 0.0 } else { g.xi_norm(mode) };
        groups.entry((k * k).to_bits()).or_default().push(mode);
    }
    let mut out = vec![vec![Complex64::new(0.0, 0.0); npts]; nz];
    let mut keys: Vec<u64> = groups.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let modes = &groups[&key];
        let lu = factor(nz, f64::from_bits(key), neumann);
        let mut rhs = DMatrix::<f64>::zeros(nz, 2 * modes.len());
        for (c, &mode) in modes.iter().enumerate() {
            for j in 1..nz - 1 {
                rhs[(j, 2 * c)] = fh[j][mode].re;
                rhs[(j, 2 * c + 1)] = fh[j][mode].im;
            }
            rhs[(nz - 1, 2 * c)] = th[mode].re;
            rhs[(nz - 1, 2 * c + 1)] = th[mode].im;
            rhs[(0, 2 * c)] = bh[mode].re;
            rhs[(0, 2 * c + 1)] = bh[mode].im;
        }
        let sol = lu.solve(&rhs).expect("flat operator is invertible");
        for (c, &mode) in modes.iter().enumerate() {
            for (j, level) in out.iter_mut().enumerate() {
                level[mode] = Complex64::new(sol[(j, 2 * c)], sol[(j, 2 * c + 1)]);
            }
        }
    }
    from_level_spectra(&g, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_dirichlet_and_neumann() {
        let g = GridSpec::new(1, 16, 33).unwrap();
        let top = SurfaceField::from_fn(&g, |x| x[0].cos());
        let f0 = StripField::zeros(&g);
        let d = solve_flat(&f0, &top, &BottomCondition::dirichlet_zero(&g));
        let exact = StripField::from_fn(&g, |x, z| (z + 1.0).sinh() / 1f64.sinh() * x[0].cos());
        assert!(d.sub(&exact).max_abs() < 1e-13);
        let n = solve_flat(&f0, &top, &BottomCondition::neumann_zero(&g));
        let exact = StripField::from_fn(&g, |x, z| (z + 1.0).cosh() / 1f64.cosh() * x[0].cos());
        assert!(n.sub(&exact).max_abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = GridSpec::new(1, 16, 17).unwrap();
        let v = solve_flat(&StripField::zeros(&g), &SurfaceField::zeros(&g), &BottomCondition::dirichlet_zero(&g));
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn maximum_principle() {
        let g = GridSpec::new(1, 32, 17).unwrap();
        let top = SurfaceField::from_fn(&g, |x| 1.5 + x[0].cos() + 0.3 * (3.0 * x[0]).sin());
        let bottom = SurfaceField::from_fn(&g, |x| 1.0 + 0.5 * (2.0 * x[0]).cos());
        let v = solve_flat(&StripField::zeros(&g), &top, &BottomCondition::Dirichlet(bottom.clone()));
        let boundary_max = top.max().max(bottom.max());
        let boundary_min = top.min().min(bottom.min());
        assert!(v.max() <= boundary_max + 1e-12);
        assert!(v.min() >= boundary_min - 1e-12);
    }
}
