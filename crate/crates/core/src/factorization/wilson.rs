//! Newton iteration for the matrix spectral factor on boundary samples.
//!
//! With `G = A^{-*} W A^{-1}` on the grid, the Newton step for
//! `A* A = W` is `A ← [G]₊ A`, where `[G]₊` keeps the analytic part of `G`
//! and half of its mean plus half the identity.

use crate::config::Config;
use crate::error::{HbError, Result};
use crate::grid::{causal_part, synthesize, BoundaryGrid};
use crate::linalg::CMat;
use crate::scalar::{lit, to_f64, Real};
use crate::series::MatrixTaylorSeries;

#[derive(Clone, Debug)]
pub(crate) struct WilsonRun<T> {
    pub mate: MatrixTaylorSeries<T>,
    pub residual: T,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// Largest operator-norm deviation of `A(ζ)* A(ζ)` from `W(ζ)` on the grid.
pub(crate) fn boundary_residual<T: Real>(mate: &MatrixTaylorSeries<T>, w: &BoundaryGrid<T>) -> T {
    let trace = synthesize(mate, w.grid_size());
    (0..w.grid_size()).fold(T::zero(), |acc, k| {
        let a = trace.sample(k);
        let d = &(&a.adjoint() * &a) - &w.sample(k);
        acc.max(d.hermitian_part().hermitian_norm())
    })
}

/// Runs the iteration from the Cholesky seed until the residual drops
/// below `target`, the iteration cap is hit, or the residual fails to
/// improve for `cfg.stall_window` consecutive steps. The best iterate is
/// returned.
pub(crate) fn wilson<T: Real>(
    w: &BoundaryGrid<T>,
    w0: &CMat<T>,
    degree: usize,
    target: T,
    cfg: &Config,
) -> Result<WilsonRun<T>> {
    let n = w0.rows();
    let size = w.grid_size();
    let degree = degree.min(size / 2 - 1);
    let seed = w0
        .hermitian_part()
        .cholesky()
        .ok_or_else(|| {
            HbError::Degenerate("mean of the spectral density is not positive definite".into())
        })?
        .adjoint();
    let mut current = MatrixTaylorSeries::constant(seed);
    let mut residual = boundary_residual(&current, w);
    let mut best = (current.clone(), residual);
    let mut history = vec![to_f64(residual)];
    let mut since_best = 0;
    let mut iterations = 0;
    let half_identity = CMat::identity(n).scale_real(lit(0.5));

    while iterations < cfg.max_iterations && best.1 > target {
        iterations += 1;
        let trace = synthesize(&current, size);
        let mut g_samples = Vec::with_capacity(size);
        for k in 0..size {
            let a = trace.sample(k);
            let inv = a.inverse().ok_or_else(|| HbError::Convergence {
                residual: to_f64(best.1),
                iterations,
                history: history.clone(),
            })?;
            g_samples.push(&(&inv.adjoint() * &w.sample(k)) * &inv);
        }
        let g = BoundaryGrid::from_matrices(n, n, &g_samples)?;
        let mut plus = causal_part(&g, degree);
        let mut coeffs = plus.coeffs().to_vec();
        coeffs[0] = &coeffs[0].hermitian_part() + &half_identity;
        plus = MatrixTaylorSeries::from_coeffs(n, n, coeffs);
        current = plus.multiply_truncated(&current, degree)?;
        residual = boundary_residual(&current, w);
        history.push(to_f64(residual));
        if !residual.is_finite() {
            break;
        }
        if residual < best.1 {
            best = (current.clone(), residual);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.stall_window {
                break;
            }
        }
    }
    Ok(WilsonRun {
        mate: best.0,
        residual: best.1,
        iterations,
        history,
    })
}
