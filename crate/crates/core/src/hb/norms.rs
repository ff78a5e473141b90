//! Norms, inner products and mates in `H(B)` from the coefficients of `φ`.

use crate::error::{HbError, Result};
use crate::hb::SymbolPhi;
use crate::linalg::CMat;
use crate::scalar::{czero, from_usize, lit, to_f64, Cx, Real};
use crate::series::{geometric_tail_fit, MatrixTaylorSeries, TaylorSeries};

/// Norm of one function together with its mate and the truncation data.
#[derive(Clone, Debug, PartialEq)]
pub struct HBReport<T> {
    /// `‖f‖²` in `H(B)`.
    pub norm_sq: T,
    /// `‖f‖²` in `H²`.
    pub hardy_norm_sq: T,
    /// The mate `f⁺ = −T_φ* f` as an `n × 1` series.
    pub mate: MatrixTaylorSeries<T>,
    /// Filled in by [`mate_residual`] when requested.
    pub mate_residual: Option<T>,
    /// Bound on the neglected tail of both sums.
    pub tail_budget: T,
    /// `(degree of f, degree of φ)` used.
    pub truncation: (usize, usize),
}

/// `(T_φ* f)_k = Σ_j c_j* f̂(j+k)` for `k = 0..=deg f`, as `n × 1` columns.
fn adjoint_action<T: Real>(f: &TaylorSeries<T>, phi: &SymbolPhi<T>) -> Vec<CMat<T>> {
    let nf = f.degree();
    let n = phi.n();
    let conj: Vec<CMat<T>> = phi
        .coeffs()
        .iter()
        .take(nf + 1)
        .map(|c| c.adjoint())
        .collect();
    let fc = f.coeffs();
    (0..=nf)
        .map(|k| {
            let mut v = vec![czero::<T>(); n];
            for (j, cj) in conj.iter().enumerate().take(nf - k + 1) {
                let x = fc[j + k];
                if x == czero() {
                    continue;
                }
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = *vi + cj[(i, 0)] * x;
                }
            }
            CMat::column_vector(&v)
        })
        .collect()
}

fn check_hypothesis<T: Real>(f: &TaylorSeries<T>, phi: &SymbolPhi<T>) -> Result<()> {
    if let Some(r) = f.decay_hint() {
        if !(r > T::one()) {
            return Err(HbError::Hypothesis(format!(
                "f must be a polynomial or analytic beyond the closed disk; decay hint {} is not above 1",
                to_f64(r)
            )));
        }
    }
    if phi.degree() < f.degree() {
        return Err(HbError::ExtensionRequired {
            requested: f.degree(),
            available: phi.degree(),
        });
    }
    Ok(())
}

/// Geometric tail budget for a truncated `f` with decay hint `r > 1`.
fn tail_budget<T: Real>(f: &TaylorSeries<T>, phi: &SymbolPhi<T>, action: &[CMat<T>]) -> Result<T> {
    let Some(hint) = f.decay_hint() else {
        return Ok(T::zero());
    };
    let nf = f.degree();
    let inv_r = T::one() / hint;
    let mags: Vec<T> = f.coeffs().iter().map(|c| c.norm()).collect();
    // Prefactor C_f with |f̂(j)| ≤ C_f r^{-j} over the last quarter.
    let start = nf - (nf + 1) / 4;
    let c_f = (start..=nf).fold(T::zero(), |m, j| m.max(mags[j] * hint.powi(j as i32)));
    if c_f == T::zero() {
        return Ok(T::zero());
    }
    let rho = phi.tail_ratio();
    let c_phi = phi.tail_prefactor().max(
        phi.coeffs()
            .iter()
            .fold(T::zero(), |m, c| m.max(c.frobenius_norm())),
    );
    let q = rho * inv_r;
    if !(q < T::one()) {
        return Err(HbError::Precision(format!(
            "phi decays at rate {:.3} which does not beat the decay 1/{:.3} of f",
            to_f64(rho),
            to_f64(hint)
        )));
    }
    let one = T::one();
    let r2 = inv_r * inv_r;
    // Hardy part: Σ_{j>N} |f̂(j)|².
    let hardy = c_f * c_f * r2.powi(nf as i32 + 1) / (one - r2);
    // Mate part, k ≤ N: omitted Σ_{j > N-k} c_j* f̂(j+k).
    let mut mate = T::zero();
    for (k, v) in action.iter().enumerate() {
        let e = c_f * c_phi * inv_r.powi(k as i32) * q.powi((nf + 1 - k) as i32) / (one - q);
        let vn = v.frobenius_norm();
        mate = mate + lit::<T>(2.0) * vn * e + e * e;
    }
    // k > N: whole terms are omitted.
    let per = c_f * c_phi / (one - q);
    let beyond = per * per * r2.powi(nf as i32 + 1) / (one - r2);
    Ok(hardy + mate + beyond)
}

/// `‖f‖²_{H(B)} = Σ|f̂(k)|² + Σ_k ‖Σ_j c_j* f̂(j+k)‖²` together with the mate.
pub fn hb_norm<T: Real>(f: &TaylorSeries<T>, phi: &SymbolPhi<T>) -> Result<HBReport<T>> {
    check_hypothesis(f, phi)?;
    let action = adjoint_action(f, phi);
    let hardy = f.hardy_norm_sq();
    let extra = action.iter().fold(T::zero(), |s, v| {
        let x = v.frobenius_norm();
        s + x * x
    });
    let budget = tail_budget(f, phi, &action)?;
    let n = phi.n();
    let mate = MatrixTaylorSeries::from_coeffs(n, 1, action.iter().map(|v| -v).collect())
        .trimmed(T::zero());
    Ok(HBReport {
        norm_sq: hardy + extra,
        hardy_norm_sq: hardy,
        mate,
        mate_residual: None,
        tail_budget: budget,
        truncation: (f.degree(), phi.degree()),
    })
}

/// `⟨f, g⟩_{H(B)} = ⟨f, g⟩_{H²} + ⟨f⁺, g⁺⟩_{H²}`, linear in `f`.
pub fn hb_inner_product<T: Real>(
    f: &TaylorSeries<T>,
    g: &TaylorSeries<T>,
    phi: &SymbolPhi<T>,
) -> Result<Cx<T>> {
    check_hypothesis(f, phi)?;
    check_hypothesis(g, phi)?;
    let d = f.degree().max(g.degree());
    let (fp, gp) = (f.resized(d), g.resized(d));
    let hardy = (0..=d).fold(czero::<T>(), |s, k| s + fp.coeff(k) * gp.coeff(k).conj());
    let af = adjoint_action(&fp, phi);
    let ag = adjoint_action(&gp, phi);
    let mates = af.iter().zip(&ag).fold(czero::<T>(), |s, (x, y)| {
        s + x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .fold(czero::<T>(), |t, (p, q)| t + *p * q.conj())
    });
    Ok(hardy + mates)
}

/// `‖T_B* f + T_A* f⁺‖` over the first `k` coefficients, using the `k × k`
/// analytic-Toeplitz truncations of both adjoints.
pub fn mate_residual<T: Real>(
    f: &TaylorSeries<T>,
    mate: &MatrixTaylorSeries<T>,
    row: &MatrixTaylorSeries<T>,
    matrix_mate: &MatrixTaylorSeries<T>,
    k: usize,
) -> Result<T> {
    let n = row.cols();
    if row.rows() != 1 || mate.shape() != (n, 1) || matrix_mate.shape() != (n, n) {
        return Err(HbError::Shape(format!(
            "mate {:?}, row {:?}, matrix {:?}",
            mate.shape(),
            row.shape(),
            matrix_mate.shape()
        )));
    }
    let b_adj: Vec<CMat<T>> = (0..k).map(|j| row.coeff(j).adjoint()).collect();
    let a_adj: Vec<CMat<T>> = (0..k).map(|j| matrix_mate.coeff(j).adjoint()).collect();
    let mut total = T::zero();
    for out in 0..k {
        let mut acc = CMat::zeros(n, 1);
        for j in 0..k - out {
            let fj = f.coeff(j + out);
            if fj != czero() {
                acc += &b_adj[j].scale(fj);
            }
            let mj = mate.coeff(j + out);
            if mj.max_abs() > T::zero() {
                acc += &(&a_adj[j] * &mj);
            }
        }
        let x = acc.frobenius_norm();
        total = total + x * x;
    }
    Ok(total.sqrt())
}

/// `‖z^m‖² = 1 + Σ_{j≤m} c_j c_j*`.
pub fn monomial_norm<T: Real>(m: usize, phi: &SymbolPhi<T>) -> Result<T> {
    if m > phi.degree() {
        return Err(HbError::ExtensionRequired {
            requested: m,
            available: phi.degree(),
        });
    }
    Ok(phi.coeffs()[..=m].iter().fold(T::one(), |s, c| {
        let x = c.frobenius_norm();
        s + x * x
    }))
}

/// Truncated Szegő kernel `Σ_{j≤N} λ̄^j z^j`, carrying the decay hint `1/|λ|`.
pub fn szego_kernel_series<T: Real>(lambda: Cx<T>, degree: usize) -> TaylorSeries<T> {
    TaylorSeries::geometric(lambda.conj(), degree)
}

/// Geometric decay fit of `‖c_j‖`, exposed for scans.
pub fn phi_decay<T: Real>(phi: &SymbolPhi<T>) -> (T, T) {
    let mags: Vec<T> = phi.coeffs().iter().map(|c| c.frobenius_norm()).collect();
    geometric_tail_fit(&mags, T::epsilon() * from_usize::<T>(100))
}
