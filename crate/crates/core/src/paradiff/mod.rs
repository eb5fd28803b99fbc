//! Paraproducts, the Bony remainder and paradifferential operators.

mod operator;
mod paraproduct;
mod symbol;

pub use operator::{
    commutator_ds, composition_residual, loglog_slope, paradiff_apply, paradiff_block, symbol_seminorm,
    SymbolSeminorm,
};
pub use paraproduct::{bony_remainder, paraproduct, paraproduct_advection};
pub use symbol::SymbolField;
