//! Scalar and matrix outer mates of a Schur row.
//!
//! Matrix factors come from a Newton iteration on boundary samples. When
//! the spectral density is a Laurent polynomial (every polynomial or
//! rational row) the iterate is refined by Gauss–Newton on the coefficient
//! equations, which keeps full accuracy even when `det W` touches zero on
//! the circle. Scalar factors start from the cepstrum and receive the same
//! refinement.

mod cepstrum;
mod certificate;
mod polish;
mod wilson;

pub use certificate::{outerness_certificate, OuterCertificate};

use crate::config::Config;
use crate::error::{HbError, Result};
use crate::grid::{synthesize, BoundaryGrid};
use crate::hb::SchurRow;
use crate::linalg::CMat;
use crate::scalar::{abs, creal, lit, to_f64, Real};
use crate::series::{MatrixTaylorSeries, TaylorSeries};
use polish::{boundary_zeros, detect_laurent, polish, Laurent};
use serde::Serialize;

/// Laurent bandwidth up to which the coefficient refinement is attempted.
pub const MAX_POLISH_BANDWIDTH: usize = 32;
/// `det W` below this fraction of its maximum marks a boundary zero.
pub const BOUNDARY_ZERO_REL_TOL: f64 = 1e-12;
/// The Newton iteration hands over to the refinement below this residual.
pub const HANDOFF_RESIDUAL: f64 = 1e-6;

/// How a matrix factor was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorTrace {
    pub iterations: usize,
    /// Boundary residual after each Newton step (index 0 is the seed).
    pub history: Vec<f64>,
    /// Whether the Gauss–Newton refinement produced the returned factor.
    pub refined: bool,
    /// Number of boundary zeros of `det W` that were pinned.
    pub boundary_zeros: usize,
    /// Fraction of grid points trimmed as degenerate.
    pub trimmed_fraction: f64,
}

/// A factor with its own boundary residual.
#[derive(Clone, Debug)]
pub struct MatrixFactor<T> {
    pub mate: MatrixTaylorSeries<T>,
    pub residual: T,
    pub trace: FactorTrace,
}

/// Scalar factor with its boundary residual.
#[derive(Clone, Debug)]
pub struct ScalarFactor<T> {
    pub mate: TaylorSeries<T>,
    pub residual: T,
    pub refined: bool,
    pub trimmed_fraction: f64,
}

/// Outer mates of a Schur row together with their certificates.
#[derive(Clone, Debug)]
pub struct FactorizationResult<T> {
    /// Scalar mate `a` with `|a|² = 1 − BB*` on the circle and `a(0) > 0`.
    pub scalar_mate: TaylorSeries<T>,
    /// Matrix mate `A` with `A*A = I − B*B` on the circle and `A(0) ≻ 0`.
    pub matrix_mate: MatrixTaylorSeries<T>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub outer_gap_scalar: OuterCertificate,
    pub outer_gap_matrix: OuterCertificate,
    pub trace: FactorTrace,
    pub degree: usize,
    pub grid: usize,
}

/// Boundary residuals of a factorization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// `max | |a(ζ)|² − (1 − B(ζ)B(ζ)*) |`.
    pub scalar: f64,
    /// `max ‖A(ζ)*A(ζ) + B(ζ)*B(ζ) − I‖`.
    pub matrix: f64,
    /// `max |B(A*A)⁻¹B* − BB*/|a|²| / (1 + BB*/|a|²)`.
    pub relation: f64,
    /// Grid points skipped because `|a|` or `A` was numerically singular there.
    pub trimmed: usize,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.scalar.max(self.matrix).max(self.relation)
    }
}

/// Scalar outer function with `|a|² = w` on the grid and `a(0) > 0`.
pub fn scalar_outer_factor<T: Real>(w: &BoundaryGrid<T>, cfg: &Config) -> Result<ScalarFactor<T>> {
    if w.shape() != (1, 1) {
        return Err(HbError::Shape(format!(
            "scalar weight expected, got {:?}",
            w.shape()
        )));
    }
    let size = w.grid_size();
    let values: Vec<T> = w.scalar_samples().iter().map(|z| z.re).collect();
    let peak = values.iter().fold(T::zero(), |a, &b| a.max(b));
    let eps_deg = lit::<T>(cfg.eps_deg);
    let trimmed = values.iter().filter(|&&x| x < eps_deg).count();
    if !(peak > T::zero()) || trimmed as f64 > cfg.trim_cap * size as f64 {
        return Err(HbError::LogIntegrability {
            trimmed,
            total: size,
        });
    }
    let trimmed_fraction = trimmed as f64 / size as f64;
    let mut mate = cepstrum::cepstral_outer(&values, eps_deg, cfg.degree);
    let mut refined = false;
    let fourier = w.fourier_coefficients();
    if let Some(laurent) = detect_laurent(&fourier, MAX_POLISH_BANDWIDTH) {
        let pins = boundary_zeros(&laurent, lit(BOUNDARY_ZERO_REL_TOL));
        let init: Vec<CMat<T>> = mate.coeffs().iter().map(|&c| CMat::scalar(c)).collect();
        if let Some((coeffs, _)) = polish(&laurent, &init, &pins) {
            let candidate = TaylorSeries::new(coeffs.iter().map(|c| c[(0, 0)]).collect());
            if scalar_residual(&candidate, &values) < scalar_residual(&mate, &values) {
                mate = candidate;
                refined = true;
            }
        }
    }
    let mate = normalize_scalar(&mate);
    let residual = scalar_residual(&mate, &values);
    if !(residual <= lit(cfg.factor_tol)) {
        return Err(HbError::Convergence {
            residual: to_f64(residual),
            iterations: 0,
            history: vec![to_f64(residual)],
        });
    }
    Ok(ScalarFactor {
        mate,
        residual,
        refined,
        trimmed_fraction,
    })
}

fn scalar_residual<T: Real>(a: &TaylorSeries<T>, w: &[T]) -> T {
    let trace = synthesize(&a.to_matrix_series(), w.len());
    trace
        .scalar_samples()
        .iter()
        .zip(w)
        .fold(T::zero(), |m, (z, &x)| m.max(abs(z.norm_sqr() - x)))
}

/// Multiplies by the unimodular constant that makes `a(0)` real and positive.
pub fn normalize_scalar<T: Real>(a: &TaylorSeries<T>) -> TaylorSeries<T> {
    let a0 = a.coeff(0);
    if a0.norm() == T::zero() {
        return a.clone();
    }
    let mut out = a.scale(a0.conj() / a0.norm());
    let mut coeffs = out.coeffs().to_vec();
    coeffs[0] = creal(coeffs[0].re);
    out = TaylorSeries::new(coeffs);
    match a.decay_hint() {
        Some(h) => out.with_decay_hint(h),
        None => out,
    }
}

/// Left constant unitary `U` with `U·A(0) ≻ 0`, and the re-gauged series.
pub fn normalize_matrix<T: Real>(
    a: &MatrixTaylorSeries<T>,
) -> Result<(MatrixTaylorSeries<T>, CMat<T>)> {
    let (u, p) = a
        .coeff(0)
        .polar()
        .ok_or_else(|| HbError::NotInvertibleAtOrigin(to_f64(a.coeff(0).det().norm())))?;
    let gauge = u.adjoint();
    let mut out = a.left_mul_const(&gauge)?;
    let mut coeffs = out.coeffs().to_vec();
    coeffs[0] = p;
    out = MatrixTaylorSeries::from_coeffs(a.rows(), a.cols(), coeffs);
    Ok((out, gauge))
}

/// Outer matrix function with `A*A = W` on the grid and `A(0) ≻ 0`.
pub fn matrix_outer_factor<T: Real>(w: &BoundaryGrid<T>, cfg: &Config) -> Result<MatrixFactor<T>> {
    let (n, m) = w.shape();
    if n != m {
        return Err(HbError::Shape(format!(
            "spectral density must be square, got {:?}",
            w.shape()
        )));
    }
    let size = w.grid_size();
    let samples = w.samples();
    let scale = samples.iter().fold(T::zero(), |a, s| a.max(s.max_abs()));
    if !(scale > T::zero()) {
        return Err(HbError::Degenerate(
            "spectral density vanishes identically".into(),
        ));
    }
    let skew = samples
        .iter()
        .fold(T::zero(), |a, s| a.max(s.skew_defect()));
    if skew > scale * lit(1e-10) {
        return Err(HbError::Hypothesis(format!(
            "spectral density is not Hermitian (defect {:.2e})",
            to_f64(skew)
        )));
    }
    let dets: Vec<T> = samples
        .iter()
        .map(|s| s.hermitian_part().det().re)
        .collect();
    let det_peak = dets.iter().fold(T::zero(), |a, &b| a.max(b));
    let eps_deg = lit::<T>(cfg.eps_deg);
    let trimmed = dets
        .iter()
        .filter(|&&d| d < eps_deg * det_peak.max(T::one()))
        .count();
    if trimmed as f64 > cfg.trim_cap * size as f64 || !(det_peak > T::zero()) {
        return Err(HbError::Degenerate(format!(
            "det W is below {:.1e} on {trimmed} of {size} grid points",
            cfg.eps_deg
        )));
    }
    let trimmed_fraction = trimmed as f64 / size as f64;
    let fourier = w.fourier_coefficients();
    let laurent = detect_laurent(&fourier, MAX_POLISH_BANDWIDTH);
    let target = if laurent.is_some() {
        lit::<T>(HANDOFF_RESIDUAL).max(lit(cfg.iteration_tol))
    } else {
        lit(cfg.iteration_tol)
    };
    let degree = cfg.degree.min(size / 2 - 1);
    let run = wilson::wilson(w, &fourier[0], degree, target, cfg)?;
    let (mut mate, _) = normalize_matrix(&run.mate)?;
    let mut residual = run.residual;
    let mut trace = FactorTrace {
        iterations: run.iterations,
        history: run.history,
        refined: false,
        boundary_zeros: 0,
        trimmed_fraction,
    };
    if let Some(laurent) = laurent {
        if let Some(refined) = refine(&laurent, &mate, w)? {
            trace.boundary_zeros = refined.2;
            if refined.1 < residual {
                mate = refined.0;
                residual = refined.1;
                trace.refined = true;
            }
        }
    }
    if !(residual <= lit(cfg.factor_tol)) {
        return Err(HbError::Convergence {
            residual: to_f64(residual),
            iterations: trace.iterations,
            history: trace.history,
        });
    }
    Ok(MatrixFactor {
        mate,
        residual,
        trace,
    })
}

type Refined<T> = (MatrixTaylorSeries<T>, T, usize);

fn refine<T: Real>(
    laurent: &Laurent<T>,
    start: &MatrixTaylorSeries<T>,
    w: &BoundaryGrid<T>,
) -> Result<Option<Refined<T>>> {
    let pins = boundary_zeros(laurent, lit(BOUNDARY_ZERO_REL_TOL));
    let Some((coeffs, _)) = polish(laurent, start.coeffs(), &pins) else {
        return Ok(None);
    };
    let n = laurent.size();
    let (mate, _) = normalize_matrix(&MatrixTaylorSeries::from_coeffs(n, n, coeffs))?;
    let residual = wilson::boundary_residual(&mate, w);
    Ok(Some((mate, residual, pins.len())))
}

/// Boundary residuals of `(a, A)` against `B` on the `size`-point grid.
pub fn factorization_residuals<T: Real>(
    b: &SchurRow<T>,
    scalar_mate: &TaylorSeries<T>,
    matrix_mate: &MatrixTaylorSeries<T>,
    size: usize,
    eps_floor: f64,
) -> Result<Residuals> {
    let n = b.n();
    if matrix_mate.shape() != (n, n) {
        return Err(HbError::Shape(format!(
            "matrix mate {:?} for a row of length {n}",
            matrix_mate.shape()
        )));
    }
    let b_trace = b.boundary_trace(size);
    let a_trace = synthesize(&scalar_mate.to_matrix_series(), size);
    let m_trace = synthesize(matrix_mate, size);
    let floor = lit::<T>(eps_floor);
    let identity = CMat::identity(n);
    let mut out = Residuals {
        scalar: 0.0,
        matrix: 0.0,
        relation: 0.0,
        trimmed: 0,
    };
    let (mut rs, mut rm, mut rr) = (T::zero(), T::zero(), T::zero());
    for k in 0..size {
        let row = b_trace.sample(k);
        let bb = (&row * &row.adjoint())[(0, 0)].re;
        let a = a_trace.scalar_samples()[k];
        let a2 = a.norm_sqr();
        rs = rs.max(abs(a2 - (T::one() - bb)));
        let am = m_trace.sample(k);
        let gram = &am.adjoint() * &am;
        let defect = &(&gram + &(&row.adjoint() * &row)) - &identity;
        rm = rm.max(defect.hermitian_part().hermitian_norm());
        if !(a.norm() > floor) {
            out.trimmed += 1;
            continue;
        }
        let Some(solved) = gram.hermitian_part().solve(&row.adjoint()) else {
            out.trimmed += 1;
            continue;
        };
        let lhs = (&row * &solved)[(0, 0)].re;
        let rhs = bb / a2;
        rr = rr.max(abs(lhs - rhs) / (T::one() + rhs));
    }
    out.scalar = to_f64(rs);
    out.matrix = to_f64(rm);
    out.relation = to_f64(rr);
    Ok(out)
}

/// Factors `I − B*B` and `1 − BB*` for a Schur row.
///
/// Rational rows `B = P/q` are handled through their numerators: the
/// polynomial densities `|q|²I − P*P` and `|q|² − PP*` are factored and the
/// results divided by `q`, which is outer.
pub fn factor_symbol<T: Real>(b: &SchurRow<T>, cfg: &Config) -> Result<FactorizationResult<T>> {
    cfg.validate()?;
    if !b.szego_ok() {
        return Err(HbError::LogIntegrability {
            trimmed: (to_f64(b.trimmed_fraction()) * cfg.grid as f64).round() as usize,
            total: cfg.grid,
        });
    }
    let n = b.n();
    let size = cfg.grid;
    let (num_trace, den_sq, inv_q) = match b.rational_form() {
        Some(r) => {
            let num = synthesize(&MatrixTaylorSeries::from_row(&r.numerators), size);
            let den = synthesize(&r.denominator.to_matrix_series(), size);
            let den_sq: Vec<T> = den.scalar_samples().iter().map(|z| z.norm_sqr()).collect();
            let inv = r.denominator.reciprocal(cfg.degree, lit(cfg.eps_floor))?;
            (num, den_sq, Some(inv))
        }
        None => (b.boundary_trace(size), vec![T::one(); size], None),
    };
    let identity = CMat::identity(n);
    let mut density = Vec::with_capacity(size);
    let mut weight = Vec::with_capacity(size);
    for (k, &q2) in den_sq.iter().enumerate() {
        let p = num_trace.sample(k);
        density.push(&identity.scale_real(q2) - &(&p.adjoint() * &p));
        let pp = p.as_slice().iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        weight.push(creal(q2 - pp));
    }
    let density = BoundaryGrid::from_matrices(n, n, &density)?;
    let weight = BoundaryGrid::from_scalar_samples(weight)?;
    let matrix = matrix_outer_factor(&density, cfg)?;
    let scalar = scalar_outer_factor(&weight, cfg)?;
    let (matrix_mate, scalar_mate) = match inv_q.filter(|_| b.denominator_degree() > 0) {
        Some(inv) => (
            normalize_matrix(&matrix.mate.scalar_multiply_truncated(&inv, cfg.degree))?.0,
            normalize_scalar(&scalar.mate.multiply_truncated(&inv, cfg.degree)),
        ),
        None => (matrix.mate.clone(), scalar.mate.clone()),
    };
    let residuals = factorization_residuals(b, &scalar_mate, &matrix_mate, size, cfg.eps_floor)?;
    let tol = cfg.factor_tol;
    if !(residuals.scalar <= tol && residuals.matrix <= tol) {
        return Err(HbError::Convergence {
            residual: residuals.scalar.max(residuals.matrix),
            iterations: matrix.trace.iterations,
            history: matrix.trace.history.clone(),
        });
    }
    let outer_gap_matrix = outerness_certificate(&matrix_mate, size)?;
    let outer_gap_scalar = outerness_certificate(&scalar_mate.to_matrix_series(), size)?;
    Ok(FactorizationResult {
        scalar_mate,
        matrix_mate,
        residuals,
        iterations: matrix.trace.iterations,
        outer_gap_scalar,
        outer_gap_matrix,
        trace: matrix.trace,
        degree: cfg.degree,
        grid: size,
    })
}
