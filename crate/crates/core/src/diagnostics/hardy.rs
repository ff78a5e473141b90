//! Whether `H(B)` coincides with `H²` (with equivalent norms).
//!
//! Equivalent conditions: `sup ‖B‖ < 1` on the disk, `φ ∈ H∞`, `B/a ∈ H∞`.
//! Suprema over the disk are taken on the circle (maximum principle).

use crate::diagnostics::inclusion::{
    combine, refine_minimum, InclusionParams, Verdict, DIVERGENT_RATIO, SUMMABLE_RATIO,
};
use crate::error::Result;
use crate::grid::synthesize;
use crate::hb::{SchurRow, SymbolPhi};
use crate::scalar::{lit, to_f64, Real};
use crate::series::{geometric_tail_fit, MatrixTaylorSeries, TaylorSeries};
use serde::Serialize;

/// `1 − sup‖B‖` must exceed this for the supremum to count as below 1.
pub const SUP_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupCheck {
    pub holds: Option<bool>,
    /// Supremum over the circle of the truncation.
    pub sup: f64,
    /// Geometric bound on the neglected tail (infinite if it does not decay).
    pub tail_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyVerdict {
    Equal,
    NotEqual,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualsHardyReport {
    pub sup_b: f64,
    /// `1 − sup‖B‖`.
    pub margin: f64,
    pub b_strict: Option<bool>,
    pub phi_bounded: SupCheck,
    pub b_over_a_bounded: SupCheck,
    pub verdict: HardyVerdict,
    pub inconclusive: bool,
}

fn norm_on_circle<T: Real>(b: &SchurRow<T>, theta: f64) -> f64 {
    to_f64(b.evaluate_on_circle(lit(theta)).frobenius_norm())
}

fn sup_of_series<T: Real>(s: &MatrixTaylorSeries<T>, size: usize) -> Result<SupCheck> {
    let trace = synthesize(s, size);
    let sup = (0..size).fold(0.0f64, |m, k| {
        m.max(to_f64(trace.sample(k).frobenius_norm()))
    });
    let mags: Vec<T> = s.coeffs().iter().map(|c| c.frobenius_norm()).collect();
    let noise = T::epsilon() * lit(100.0);
    let (ratio, prefactor) = geometric_tail_fit(&mags, noise);
    let (ratio, prefactor) = (to_f64(ratio), to_f64(prefactor));
    let n = s.degree() as i32;
    let tail_bound = if ratio < 1.0 {
        prefactor * ratio.powi(n + 1) / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    let holds = if ratio < SUMMABLE_RATIO {
        Some(true)
    } else if ratio > DIVERGENT_RATIO {
        Some(false)
    } else {
        None
    };
    Ok(SupCheck {
        holds,
        sup,
        tail_bound,
    })
}

pub fn equals_hardy_report<T: Real>(
    b: &SchurRow<T>,
    scalar_mate: &TaylorSeries<T>,
    phi: &SymbolPhi<T>,
    params: &InclusionParams,
) -> Result<EqualsHardyReport> {
    let size = params.grid;
    let step = std::f64::consts::TAU / size as f64;
    let norms: Vec<f64> = (0..size)
        .map(|k| norm_on_circle(b, k as f64 * step))
        .collect();
    let (k_max, _) =
        norms.iter().enumerate().fold(
            (0, f64::MIN),
            |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
        );
    let theta = k_max as f64 * step;
    let (_, neg) = refine_minimum(|t| -norm_on_circle(b, t), theta - step, theta + step);
    let sup_b = (-neg).max(norms[k_max]);
    let margin = 1.0 - sup_b;
    let b_strict = Some(margin > SUP_MARGIN);
    let phi_bounded = sup_of_series(
        &phi.series(),
        size.max(2 * phi.degree() + 2).next_power_of_two(),
    )?;
    let degree = params.degree;
    let inv_a = scalar_mate.reciprocal(degree, lit(params.eps_floor))?;
    let comps: Vec<TaylorSeries<T>> = b
        .coefficients_to(degree)?
        .iter()
        .map(|c| c.multiply_truncated(&inv_a, degree))
        .collect();
    let b_over_a = MatrixTaylorSeries::from_row(&comps);
    let b_over_a_bounded = sup_of_series(&b_over_a, size.max(2 * degree + 2).next_power_of_two())?;
    let (verdict, inconclusive) = combine(&[b_strict, phi_bounded.holds, b_over_a_bounded.holds]);
    let verdict = match verdict {
        Verdict::ContainsHinf => HardyVerdict::Equal,
        Verdict::NotContains => HardyVerdict::NotEqual,
        Verdict::Inconsistent => HardyVerdict::Inconsistent,
    };
    Ok(EqualsHardyReport {
        sup_b,
        margin,
        b_strict,
        phi_bounded,
        b_over_a_bounded,
        verdict,
        inconclusive,
    })
}
