use crate::error::{HbError, Result};
use crate::hb::SchurRow;
use crate::linalg::CMat;
use crate::scalar::{lit, to_f64, Real};
use crate::series::{adjugate_det, geometric_tail_fit, MatrixTaylorSeries};
use serde::{Deserialize, Serialize};

/// Where the coefficients of `φ` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiSource {
    ClosedForm,
    ComputedA,
}

/// Verification residual `‖φA − B‖` above which a warning is attached.
pub const PHI_VERIFY_TOL: f64 = 1e-9;

/// Row coefficients `c_j` of `φ = BA⁻¹ = Σ c_j z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPhi<T> {
    coeffs: Vec<CMat<T>>,
    tail_ratio: T,
    tail_prefactor: T,
    source: PhiSource,
    verification_residual: T,
    warning: Option<String>,
}

impl<T: Real> SymbolPhi<T> {
    /// Wraps known coefficients (each a `1 × n` row) and fits their decay.
    pub fn from_coeffs(coeffs: Vec<CMat<T>>, source: PhiSource) -> Result<Self> {
        let n = coeffs.first().map_or(0, |c| c.cols());
        if coeffs.is_empty() || coeffs.iter().any(|c| c.shape() != (1, n)) {
            return Err(HbError::Shape(
                "phi coefficients must be 1 x n rows of one width".into(),
            ));
        }
        let mags: Vec<T> = coeffs.iter().map(|c| c.frobenius_norm()).collect();
        let (tail_ratio, tail_prefactor) = geometric_tail_fit(&mags, T::epsilon() * lit(100.0));
        Ok(SymbolPhi {
            coeffs,
            tail_ratio,
            tail_prefactor,
            source,
            verification_residual: T::zero(),
            warning: None,
        })
    }

    pub(crate) fn from_parts(
        coeffs: Vec<CMat<T>>,
        tail_ratio: T,
        tail_prefactor: T,
        source: PhiSource,
        verification_residual: T,
        warning: Option<String>,
    ) -> Self {
        SymbolPhi {
            coeffs,
            tail_ratio,
            tail_prefactor,
            source,
            verification_residual,
            warning,
        }
    }

    /// All-zero symbol of width `n` to the given degree.
    pub fn zero(n: usize, degree: usize) -> Self {
        SymbolPhi {
            coeffs: vec![CMat::zeros(1, n); degree + 1],
            tail_ratio: T::zero(),
            tail_prefactor: T::zero(),
            source: PhiSource::ClosedForm,
            verification_residual: T::zero(),
            warning: None,
        }
    }

    pub fn with_tail(mut self, ratio: T, prefactor: T) -> Self {
        self.tail_ratio = ratio;
        self.tail_prefactor = prefactor;
        self
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].cols()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMat<T>] {
        &self.coeffs
    }

    /// `c_j` as a `1 × n` row.
    pub fn coeff(&self, j: usize) -> &CMat<T> {
        &self.coeffs[j]
    }

    /// Fitted geometric decay of `‖c_j‖` (reported even when `≥ 1`).
    pub fn tail_ratio(&self) -> T {
        self.tail_ratio
    }

    /// `C` in the fitted bound `‖c_j‖ ≲ C ρ^j`.
    pub fn tail_prefactor(&self) -> T {
        self.tail_prefactor
    }

    pub fn source(&self) -> PhiSource {
        self.source
    }

    /// Largest coefficient of `φA − B` over the stored degree.
    pub fn verification_residual(&self) -> T {
        self.verification_residual
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// Coefficients after the gauge change `A ↦ UA`, i.e. `c_j ↦ c_j U*`.
    pub fn regauged(&self, unitary: &CMat<T>) -> Self {
        let ua = unitary.adjoint();
        SymbolPhi {
            coeffs: self.coeffs.iter().map(|c| c * &ua).collect(),
            ..self.clone()
        }
    }

    pub fn series(&self) -> MatrixTaylorSeries<T> {
        MatrixTaylorSeries::from_coeffs(1, self.n(), self.coeffs.clone())
    }

    pub fn cast<S: Real>(&self) -> SymbolPhi<S> {
        let series = self.series().cast::<S>();
        SymbolPhi {
            coeffs: series.coeffs().to_vec(),
            tail_ratio: lit(to_f64(self.tail_ratio)),
            tail_prefactor: lit(to_f64(self.tail_prefactor)),
            source: self.source,
            verification_residual: lit(to_f64(self.verification_residual)),
            warning: self.warning.clone(),
        }
    }
}

/// `c_j` from `φ = B·adj(A)·(det A)⁻¹`, truncated at `degree`, with the
/// verification residual `φA − B` attached.
pub fn phi_coefficients<T: Real>(
    b: &SchurRow<T>,
    mate: &MatrixTaylorSeries<T>,
    degree: usize,
    eps_floor: f64,
) -> Result<SymbolPhi<T>> {
    let n = b.n();
    if mate.shape() != (n, n) {
        return Err(HbError::Shape(format!(
            "matrix mate {:?} for a row of length {n}",
            mate.shape()
        )));
    }
    let a = mate.resized(degree.max(mate.degree()));
    let (adj, det) = adjugate_det(&a)?;
    let inv_det = det.reciprocal(degree, lit(eps_floor))?;
    let row = b.row_series().resized(degree);
    let numer = row.multiply_truncated(&adj, degree)?;
    let phi = numer.scalar_multiply_truncated(&inv_det, degree);
    let mut out = SymbolPhi::from_coeffs(phi.coeffs().to_vec(), PhiSource::ComputedA)?;
    let check = phi.multiply_truncated(mate, degree)?;
    out.verification_residual = check.max_abs_diff(&row);
    if !(out.verification_residual <= lit(PHI_VERIFY_TOL)) {
        out.warning = Some(format!(
            "phi*A - B has coefficients up to {:.2e}",
            to_f64(out.verification_residual)
        ));
    }
    Ok(out)
}
