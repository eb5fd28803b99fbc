//! Periodic grids, transforms, Littlewood–Paley blocks and norm calculators.

pub mod dyadic;
pub mod fft;
mod field;
mod grid;
pub mod norms;
mod strip;
mod zgrid;

pub use dyadic::{dyadic_block, low_pass, DyadicDecomposition};
pub use field::{divergence, dot, SurfaceField};
pub use grid::GridSpec;
pub use norms::{besov_norm, chemin_lerner_norm, sobolev_norm, zygmund_norm};
pub use strip::StripField;
pub use zgrid::ZGrid;
