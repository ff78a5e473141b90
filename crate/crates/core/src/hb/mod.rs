//! The space `H(B)`: admitted symbols, the coefficients of `φ`, and norms.

mod kernel;
mod norms;
mod phi;
mod schur_row;

pub use kernel::{
    kappa_series, kernel_kb, kernel_kb_series, shifted_symbol_kernel_norm, shifted_szego_norm,
    symbol_kernel_norm, szego_kernel_norm,
};
pub use norms::{
    hb_inner_product, hb_norm, mate_residual, monomial_norm, phi_decay, szego_kernel_series,
    HBReport,
};
pub use phi::{phi_coefficients, PhiSource, SymbolPhi, PHI_VERIFY_TOL};
pub use schur_row::{RationalRow, SchurRow, SCHUR_SLACK};
