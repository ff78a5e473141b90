//! de Branges–Rovnyak spaces `H(B)` for row Schur symbols `B = (b_1, …, b_n)`.
//!
//! The library computes the outer mates of `B`, the coefficient sequence of
//! `φ = B A⁻¹`, and from it norms, inner products and kernel norms in `H(B)`.
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix double precision.

// `!(x > tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod factorization;
pub mod grid;
pub mod hb;
pub mod json;
pub mod linalg;
pub mod models;
pub mod parse;
pub mod scalar;
pub mod series;

pub use config::Config;
pub use error::{HbError, Result};

pub type Complex = scalar::Cx<f64>;
pub type Series = series::TaylorSeries<f64>;
pub type MatrixSeries = series::MatrixTaylorSeries<f64>;
pub type Matrix = linalg::CMat<f64>;
pub type Row = hb::SchurRow<f64>;
pub type Phi = hb::SymbolPhi<f64>;
pub type Model = models::ModelInstance<f64>;
pub type Factorization = factorization::FactorizationResult<f64>;
