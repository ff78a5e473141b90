//! Two estimates of `‖f‖²_{H(B)}` that use neither `A` nor `φ`.
//!
//! The Gram oracle projects `f` onto a span of kernel functions and is a
//! lower bound. The defect oracle works in the range-space picture: it
//! compresses `D = I − T_B T_B*` to the first `N` coefficients and returns
//! `⟨D⁺f, f⟩`, which increases towards the norm as `N` grows.

use crate::error::{HbError, Result};
use crate::hb::{kernel_kb, SchurRow};
use crate::linalg::CMat;
use crate::scalar::{czero, from_usize, lit, to_f64, unit, Cx, Real};
use crate::series::TaylorSeries;
use serde::Serialize;

/// Gram matrices with a larger condition number are refused.
pub const GRAM_CONDITION_CAP: f64 = 1e12;
/// Eigenvalues of `D` below this fraction of the largest are dropped.
pub const DEFECT_EIGEN_CUTOFF: f64 = 1e-10;
/// Relative change between successive doublings that counts as converged.
pub const DOUBLING_TOL: f64 = 5e-3;
/// Largest truncation the doubling protocol tries.
pub const DOUBLING_CAP: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramEstimate {
    /// `v*G⁻¹v`, a lower bound for `‖f‖²`.
    pub value: f64,
    pub min_eigenvalue: f64,
    pub condition: f64,
    pub points: usize,
}

/// `v*G⁻¹v` with `G_pq = K_B(λ_p, λ_q)` and `v_p = f(λ_p)`.
pub fn gram_oracle_norm<T: Real>(
    f: &TaylorSeries<T>,
    b: &SchurRow<T>,
    points: &[Cx<T>],
) -> Result<GramEstimate> {
    if points.is_empty() {
        return Err(HbError::Invalid(
            "the Gram oracle needs at least one point".into(),
        ));
    }
    let m = points.len();
    let mut gram = CMat::zeros(m, m);
    for p in 0..m {
        for q in p..m {
            let k = kernel_kb(points[p], points[q], b)?;
            gram[(p, q)] = k;
            gram[(q, p)] = k.conj();
        }
    }
    let values: Vec<Cx<T>> = points
        .iter()
        .map(|&z| f.evaluate(z))
        .collect::<Result<_>>()?;
    let (eig, vecs) = gram.hermitian_eigen();
    let low = to_f64(eig[0]);
    let high = to_f64(eig[m - 1]);
    let condition = if low > 0.0 { high / low } else { f64::INFINITY };
    if !(condition <= GRAM_CONDITION_CAP) {
        return Err(HbError::IllConditioned {
            condition,
            cap: GRAM_CONDITION_CAP,
        });
    }
    let mut value = T::zero();
    for (k, &lam) in eig.iter().enumerate() {
        let proj = (0..m).fold(czero::<T>(), |s, p| s + vecs[(p, k)].conj() * values[p]);
        value = value + proj.norm_sqr() / lam;
    }
    Ok(GramEstimate {
        value: to_f64(value),
        min_eigenvalue: low,
        condition,
        points: m,
    })
}

/// Nested lattice `{0} ∪ {r_j e^{iθ_l}}` with `r_j = 0.9 j / 2^level`,
/// `j = 1..=2^level`, and `4·2^level` equally spaced angles; each level
/// contains the previous one.
pub fn radial_angular_lattice<T: Real>(level: usize) -> Vec<Cx<T>> {
    let radial = 1usize << level;
    let angular = 4 * radial;
    let mut out = vec![czero()];
    for j in 1..=radial {
        let r = lit::<T>(0.9) * from_usize::<T>(j) / from_usize::<T>(radial);
        for l in 0..angular {
            let theta =
                lit::<T>(std::f64::consts::TAU) * from_usize::<T>(l) / from_usize::<T>(angular);
            out.push(unit(theta).scale(r));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectEstimate {
    pub value: f64,
    pub size: usize,
    /// Eigenvalues of the compressed defect that fell under the cutoff.
    pub dropped: usize,
}

/// `⟨D_N⁺ f, f⟩` for the `N × N` compression of `I − T_B T_B*`.
pub fn toeplitz_defect_oracle<T: Real>(
    f: &TaylorSeries<T>,
    b: &SchurRow<T>,
    size: usize,
) -> Result<DefectEstimate> {
    if !f.is_polynomial() {
        return Err(HbError::Hypothesis(
            "the defect oracle takes polynomial f".into(),
        ));
    }
    let f = f.trimmed(T::zero());
    if f.degree() >= size {
        return Err(HbError::ExtensionRequired {
            requested: f.degree(),
            available: size.saturating_sub(1),
        });
    }
    let comps = b.coefficients_to(size - 1)?;
    // S_ik = Σ_c Σ_{j ≤ min(i,k)} b_c[i−j] conj(b_c[k−j]) = S_{i−1,k−1} + Σ_c b_c[i] conj(b_c[k]).
    let mut defect = CMat::zeros(size, size);
    for i in 0..size {
        for k in 0..=i {
            let mut s = comps
                .iter()
                .fold(czero::<T>(), |s, c| s + c.coeff(i) * c.coeff(k).conj());
            if k > 0 {
                s = s + defect[(i - 1, k - 1)];
            }
            defect[(i, k)] = s;
        }
    }
    for i in 0..size {
        for k in 0..=i {
            let s = defect[(i, k)];
            let v = if i == k {
                Cx::new(T::one() - s.re, T::zero())
            } else {
                -s
            };
            defect[(i, k)] = v;
            defect[(k, i)] = v.conj();
        }
    }
    let (eig, vecs) = defect.hermitian_eigen();
    let top = eig.iter().fold(T::zero(), |a, &b| a.max(b));
    let cutoff = top * lit(DEFECT_EIGEN_CUTOFF);
    let mut value = T::zero();
    let mut dropped = 0;
    for (k, &lam) in eig.iter().enumerate() {
        if !(lam > cutoff) {
            dropped += 1;
            continue;
        }
        let proj = (0..=f.degree()).fold(czero::<T>(), |s, p| s + vecs[(p, k)].conj() * f.coeff(p));
        value = value + proj.norm_sqr() / lam;
    }
    Ok(DefectEstimate {
        value: to_f64(value),
        size,
        dropped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectTrace {
    pub value: f64,
    pub size: usize,
    pub dropped: usize,
    /// `(N, value)` for every truncation tried.
    pub history: Vec<(usize, f64)>,
}

/// Doubles `N` from `start` until two successive values agree to
/// [`DOUBLING_TOL`]; declines after [`DOUBLING_CAP`].
pub fn toeplitz_defect_converged<T: Real>(
    f: &TaylorSeries<T>,
    b: &SchurRow<T>,
    start: usize,
) -> Result<DefectTrace> {
    let mut size = start.max(f.degree() + 1).max(2);
    let mut history = Vec::new();
    let mut previous: Option<f64> = None;
    loop {
        let est = toeplitz_defect_oracle(f, b, size)?;
        history.push((size, est.value));
        if let Some(prev) = previous {
            if (est.value - prev).abs() <= DOUBLING_TOL * est.value.abs() {
                return Ok(DefectTrace {
                    value: est.value,
                    size,
                    dropped: est.dropped,
                    history,
                });
            }
        }
        previous = Some(est.value);
        if size * 2 > DOUBLING_CAP {
            return Err(HbError::OracleDeclined { history });
        }
        size *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::scalar::cx;

    fn zero_row() -> SchurRow<f64> {
        SchurRow::new(vec![TaylorSeries::zero(0); 2], &Config::default()).unwrap()
    }

    #[test]
    fn zero_symbol_oracles_are_hardy() {
        let b = zero_row();
        let one = TaylorSeries::constant(cx(1.0, 0.0));
        assert!((gram_oracle_norm(&one, &b, &[cx(0.0, 0.0)]).unwrap().value - 1.0).abs() < 1e-15);
        let f = TaylorSeries::from_real(&[1.0, -2.0, 0.5]);
        let est = toeplitz_defect_oracle(&f, &b, 8).unwrap();
        assert!((est.value - 5.25).abs() < 1e-12 && est.dropped == 0);
    }

    #[test]
    fn lattices_are_nested() {
        let small: Vec<Cx<f64>> = radial_angular_lattice(1);
        let large: Vec<Cx<f64>> = radial_angular_lattice(2);
        assert_eq!(small.len(), 1 + 2 * 8);
        for p in &small {
            assert!(large.iter().any(|q| (p - q).norm() < 1e-14));
        }
    }
}
