//! Closed-form norms of kernel-type elements and the reproducing kernel.

use crate::error::{HbError, Result};
use crate::hb::{SchurRow, SymbolPhi};
use crate::linalg::CMat;
use crate::scalar::{cone, czero, to_f64, Cx, Real};
use crate::series::{check_interior, MatrixTaylorSeries, TaylorSeries};

fn one_minus_modulus_sq<T: Real>(lambda: Cx<T>) -> Result<T> {
    check_interior(lambda)?;
    Ok(T::one() - lambda.norm_sqr())
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(HbError::Index { index: i, n });
    }
    Ok(())
}

/// `A(λ)⁻* e_i`, i.e. the solution of `A(λ)* y = e_i`.
fn adjoint_inverse_column<T: Real>(a_at: &CMat<T>, i: usize) -> Result<CMat<T>> {
    let n = a_at.rows();
    let mut e = vec![czero(); n];
    e[i - 1] = cone();
    a_at.adjoint()
        .solve(&CMat::column_vector(&e))
        .ok_or_else(|| HbError::Singular("A(λ) is not invertible".into()))
}

/// `‖κ_λ‖² = (1 + ‖A(λ)⁻* B(λ)*‖²) / (1 − |λ|²)`.
pub fn szego_kernel_norm<T: Real>(
    lambda: Cx<T>,
    b: &SchurRow<T>,
    mate: &MatrixTaylorSeries<T>,
) -> Result<T> {
    let denom = one_minus_modulus_sq(lambda)?;
    let b_at = b.evaluate(lambda)?;
    let a_at = mate.evaluate(lambda)?;
    let y = a_at
        .adjoint()
        .solve(&b_at.adjoint())
        .ok_or_else(|| HbError::Singular("A(λ) is not invertible".into()))?;
    let yn = y.frobenius_norm();
    Ok((T::one() + yn * yn) / denom)
}

/// `‖z^m κ_λ‖² = ‖κ_λ‖² + Σ_{k<m} ‖Σ_j c*_{j+m−k} λ̄^j‖²`.
///
/// The inner sums run over the stored coefficients of `φ`; the omitted tail
/// must decay, which requires `ρ|λ| < 1` for the fitted ratio `ρ`.
pub fn shifted_szego_norm<T: Real>(
    m: usize,
    lambda: Cx<T>,
    phi: &SymbolPhi<T>,
    b: &SchurRow<T>,
    mate: &MatrixTaylorSeries<T>,
) -> Result<T> {
    let base = szego_kernel_norm(lambda, b, mate)?;
    if m > phi.degree() {
        return Err(HbError::ExtensionRequired {
            requested: m,
            available: phi.degree(),
        });
    }
    if !(phi.tail_ratio() * lambda.norm() < T::one()) {
        return Err(HbError::Precision(format!(
            "phi decay {:.3} is too slow for |λ| = {:.3}",
            to_f64(phi.tail_ratio()),
            to_f64(lambda.norm())
        )));
    }
    let lc = lambda.conj();
    let mut extra = T::zero();
    for k in 0..m {
        let shift = m - k;
        let mut acc = CMat::zeros(1, phi.n());
        let mut power = cone::<T>();
        for c in &phi.coeffs()[shift..] {
            acc += &c.scale(power);
            power = power * lc;
        }
        let x = acc.frobenius_norm();
        extra = extra + x * x;
    }
    Ok(base + extra)
}

/// `‖b_i κ_λ‖² = (‖A(λ)⁻* e_i‖² − 1) / (1 − |λ|²)`, with `i` counted from 1.
pub fn symbol_kernel_norm<T: Real>(
    i: usize,
    lambda: Cx<T>,
    mate: &MatrixTaylorSeries<T>,
) -> Result<T> {
    check_index(i, mate.rows())?;
    let denom = one_minus_modulus_sq(lambda)?;
    let y = adjoint_inverse_column(&mate.evaluate(lambda)?, i)?;
    let yn = y.frobenius_norm();
    Ok((yn * yn - T::one()) / denom)
}

/// `‖L(b_i κ_λ)‖²` where `L` is the backward shift.
///
/// Equals `‖b_i κ_λ‖² + 2ℜ(A(λ)⁻¹A(0)e_i)_i − |b_i(0)|² − ‖A(0)e_i‖² − ‖A(λ)⁻* e_i‖²`,
/// which at `λ = 0` reduces to `1 − |b_i(0)|² − ‖A(0)e_i‖²`.
pub fn shifted_symbol_kernel_norm<T: Real>(
    i: usize,
    lambda: Cx<T>,
    mate: &MatrixTaylorSeries<T>,
    b: &SchurRow<T>,
) -> Result<T> {
    check_index(i, b.n())?;
    let base = symbol_kernel_norm(i, lambda, mate)?;
    let a_at = mate.evaluate(lambda)?;
    let a0 = mate.coeff(0);
    let a0_col = CMat::column_vector(&a0.column(i - 1));
    let mixed = a_at
        .solve(&a0_col)
        .ok_or_else(|| HbError::Singular("A(λ) is not invertible".into()))?;
    let y = adjoint_inverse_column(&a_at, i)?;
    let b0 = b.evaluate(czero())?[(0, i - 1)];
    let a0n = a0_col.frobenius_norm();
    let yn = y.frobenius_norm();
    let two = T::one() + T::one();
    Ok(base + two * mixed[(i - 1, 0)].re - b0.norm_sqr() - a0n * a0n - yn * yn)
}

/// `K_B(z, λ) = (1 − B(z)B(λ)*) / (1 − zλ̄)`.
pub fn kernel_kb<T: Real>(z: Cx<T>, lambda: Cx<T>, b: &SchurRow<T>) -> Result<Cx<T>> {
    check_interior(z)?;
    check_interior(lambda)?;
    let bz = b.evaluate(z)?;
    let bl = b.evaluate(lambda)?;
    let inner = (&bz * &bl.adjoint())[(0, 0)];
    Ok((cone::<T>() - inner) / (cone::<T>() - z * lambda.conj()))
}

/// Taylor coefficients of `z ↦ K_B(z, λ)` to `degree`.
///
/// Needs a rational (or polynomial) row so that the result is analytic past
/// the closed disk; the decay hint is the slower of `1/|λ|` and the decay
/// of `B`.
pub fn kernel_kb_series<T: Real>(
    lambda: Cx<T>,
    b: &SchurRow<T>,
    degree: usize,
) -> Result<TaylorSeries<T>> {
    check_interior(lambda)?;
    let Some(rational) = b.rational_form() else {
        return Err(HbError::Hypothesis(
            "the kernel series needs a rational or polynomial row".into(),
        ));
    };
    let bl = b.evaluate(lambda)?;
    let inv_q = rational.denominator.reciprocal(degree, T::epsilon())?;
    let mut combo = TaylorSeries::zero(0);
    for (i, p) in rational.numerators.iter().enumerate() {
        combo = combo.add(&p.scale(bl[(0, i)].conj()));
    }
    let bz_bl = combo.multiply_truncated(&inv_q, degree);
    let one_minus = TaylorSeries::constant(cone()).sub(&bz_bl).resized(degree);
    let geometric = TaylorSeries::geometric(lambda.conj(), degree);
    let kernel = one_minus.multiply_truncated(&geometric, degree);
    let mut hint = geometric.decay_hint();
    if rational.denominator.degree() > 0 {
        if let Some(h) = b
            .components()
            .iter()
            .filter_map(|c| c.decay_hint())
            .reduce(|x, y| x.min(y))
        {
            hint = Some(hint.map_or(h, |g| g.min(h)));
        }
    }
    Ok(match hint {
        Some(h) => kernel.with_decay_hint(h),
        None => kernel.without_decay_hint(),
    })
}

/// Degree-`N` truncation of the Szegő kernel `κ_λ(z) = 1/(1 − zλ̄)`.
pub fn kappa_series<T: Real>(lambda: Cx<T>, degree: usize) -> Result<TaylorSeries<T>> {
    check_interior(lambda)?;
    Ok(TaylorSeries::geometric(lambda.conj(), degree))
}
