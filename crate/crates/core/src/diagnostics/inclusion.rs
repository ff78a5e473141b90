//! Numerical evidence for whether `H∞ ⊆ H(B)`.
//!
//! Four conditions are equivalent to the inclusion: bounded monomial norms,
//! `φ ∈ H²`, `B/a ∈ H²` and `(1 − BB*)⁻¹ ∈ L¹(𝕋)`. Each is evaluated by its
//! own code path and the report checks that they agree.

use crate::config::Config;
use crate::error::Result;
use crate::hb::{monomial_norm, SchurRow, SymbolPhi};
use crate::scalar::{lit, to_f64, Real};
use crate::series::{geometric_tail_fit, TaylorSeries};
use serde::Serialize;

/// Relative growth `S(N) − S(N/2)` below which monomial norms count as bounded.
pub const BOUNDED_GROWTH: f64 = 1e-8;
/// Relative growth above which monomial norms count as unbounded.
pub const UNBOUNDED_GROWTH: f64 = 0.05;
/// Fitted coefficient ratio below which a sequence counts as square-summable.
pub const SUMMABLE_RATIO: f64 = 0.98;
/// Fitted coefficient ratio above which a sequence counts as not square-summable.
pub const DIVERGENT_RATIO: f64 = 0.995;
/// Tail mass (relative to the head) that is negligible regardless of the fitted ratio.
pub const NEGLIGIBLE_TAIL: f64 = 1e-20;
/// A boundary minimum of `1 − BB*` below this fraction of its maximum is a zero.
pub const ZERO_DEPTH: f64 = 1e-12;
/// Local exponents `p` of `(1 − BB*)(θ* + h) ~ h^p`: `p ≥` this is not integrable...
pub const NONINTEGRABLE_EXPONENT: f64 = 1.1;
/// ...and `p ≤` this is integrable.
pub const INTEGRABLE_EXPONENT: f64 = 0.9;

/// One criterion: `Some(true/false)` or `None` when the evidence is inconclusive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub holds: Option<bool>,
    /// The computed quantity (a partial sum, an integral, ...).
    pub value: f64,
    /// Rate that decided the outcome: growth slope, fitted ratio or exponent.
    pub rate: f64,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    #[serde(rename = "contains_Hinf")]
    ContainsHinf,
    NotContains,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    pub crit_supnorm: Criterion,
    pub crit_phi_h2: Criterion,
    pub crit_b_over_a_h2: Criterion,
    pub crit_inv_l1: Criterion,
    pub verdict: Verdict,
    /// Set when at least one criterion was inconclusive.
    pub inconclusive: bool,
}

impl InclusionReport {
    pub fn criteria(&self) -> [&Criterion; 4] {
        [
            &self.crit_supnorm,
            &self.crit_phi_h2,
            &self.crit_b_over_a_h2,
            &self.crit_inv_l1,
        ]
    }
}

/// Grid and truncation used by the diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionParams {
    pub grid: usize,
    pub degree: usize,
    pub eps_floor: f64,
    pub eps_deg: f64,
}

impl From<&Config> for InclusionParams {
    fn from(cfg: &Config) -> Self {
        InclusionParams {
            grid: cfg.grid,
            degree: cfg.degree,
            eps_floor: cfg.eps_floor,
            eps_deg: cfg.eps_deg,
        }
    }
}

/// Combines conclusive booleans into a verdict.
pub fn combine(values: &[Option<bool>]) -> (Verdict, bool) {
    let decided: Vec<bool> = values.iter().flatten().copied().collect();
    let inconclusive = decided.len() < values.len();
    let verdict = if decided.iter().all(|&b| b) && !decided.is_empty() {
        Verdict::ContainsHinf
    } else if decided.iter().all(|&b| !b) && !decided.is_empty() {
        Verdict::NotContains
    } else {
        Verdict::Inconsistent
    };
    (verdict, inconclusive)
}

fn monomial_growth<T: Real>(phi: &SymbolPhi<T>) -> Result<Criterion> {
    let top = phi.degree();
    let half = top / 2;
    let full = to_f64(monomial_norm(top, phi)?) - 1.0;
    let head = to_f64(monomial_norm(half, phi)?) - 1.0;
    let growth = full - head;
    let scale = full.max(1.0);
    let holds = if growth <= BOUNDED_GROWTH * scale {
        Some(true)
    } else if growth >= UNBOUNDED_GROWTH * full {
        Some(false)
    } else {
        None
    };
    Ok(Criterion {
        holds,
        value: full + 1.0,
        rate: growth / (top - half).max(1) as f64,
        note: format!("sup of ‖z^m‖² over m ≤ {top}; growth over the upper half {growth:.3e}"),
    })
}

/// Square-summability from coefficient magnitudes by a geometric tail fit.
fn summability<T: Real>(mags: &[T], what: &str) -> Criterion {
    let sum: f64 = mags.iter().map(|&m| to_f64(m * m)).sum();
    let noise = T::epsilon() * lit(100.0);
    let (ratio, _) = geometric_tail_fit(mags, noise);
    let ratio = to_f64(ratio);
    let quarter = mags.len() - mags.len() / 4;
    let tail: f64 = mags[quarter..].iter().map(|&m| to_f64(m * m)).sum();
    let holds = if tail <= NEGLIGIBLE_TAIL * sum.max(1.0) || ratio < SUMMABLE_RATIO {
        Some(true)
    } else if ratio > DIVERGENT_RATIO {
        Some(false)
    } else {
        None
    };
    Criterion {
        holds,
        value: sum,
        rate: ratio,
        note: format!(
            "Σ‖{what}‖² over {} coefficients; last-quarter mass {tail:.3e}",
            mags.len()
        ),
    }
}

/// `1 − ‖B(e^{iθ})‖²`.
fn defect<T: Real>(b: &SchurRow<T>, theta: f64) -> f64 {
    let row = b.evaluate_on_circle(lit(theta));
    1.0 - row
        .as_slice()
        .iter()
        .map(|z| to_f64(z.norm_sqr()))
        .sum::<f64>()
}

/// Golden-section refinement of a bracketed minimum.
pub(crate) fn refine_minimum(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Least-squares slope of `log w` against `log h` for `h ∈ [1e-4, 1e-1]`
/// on both sides of `θ*`.
fn local_exponent(w: impl Fn(f64) -> f64, center: f64) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..=24 {
        let h = 10f64.powf(-4.0 + 3.0 * k as f64 / 24.0);
        let v = 0.5 * (w(center + h) + w(center - h));
        if v > 0.0 {
            xs.push(h.ln());
            ys.push(v.ln());
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn inverse_integrability<T: Real>(b: &SchurRow<T>, params: &InclusionParams) -> Criterion {
    let size = params.grid;
    let step = std::f64::consts::TAU / size as f64;
    let w: Vec<f64> = (0..size).map(|k| defect(b, k as f64 * step)).collect();
    let peak = w.iter().fold(0.0f64, |a, &b| a.max(b));
    let trimmed = w.iter().filter(|&&x| x < params.eps_deg).count();
    let integral = w
        .iter()
        .filter(|&&x| x >= params.eps_deg)
        .map(|&x| 1.0 / x)
        .sum::<f64>()
        / size as f64;
    let trim_note = format!("trimmed {trimmed} of {size} points");
    if !(peak > 0.0) {
        return Criterion {
            holds: Some(false),
            value: f64::INFINITY,
            rate: f64::INFINITY,
            note: "1 − BB* vanishes".into(),
        };
    }
    // Every local grid minimum is refined; a refined value that is
    // numerically zero gets a local exponent fit.
    let mut worst: Option<f64> = None;
    let mut floor = w.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    for k in 0..size {
        let (prev, next) = (w[(k + size - 1) % size], w[(k + 1) % size]);
        if !(w[k] < prev && w[k] <= next) {
            continue;
        }
        let theta = k as f64 * step;
        let (center, depth) = refine_minimum(|t| defect(b, t), theta - step, theta + step);
        floor = floor.min(depth);
        if depth <= ZERO_DEPTH * peak {
            let p = local_exponent(|t| defect(b, t), center);
            worst = Some(worst.map_or(p, |q: f64| q.max(p)));
        }
    }
    match worst {
        None => Criterion {
            holds: Some(true),
            value: integral,
            rate: 0.0,
            note: format!("min of 1 − BB* is {floor:.3e}; {trim_note}"),
        },
        Some(p) => Criterion {
            holds: if p >= NONINTEGRABLE_EXPONENT {
                Some(false)
            } else if p <= INTEGRABLE_EXPONENT {
                Some(true)
            } else {
                None
            },
            value: integral,
            rate: p,
            note: format!("1 − BB* vanishes on the circle with local exponent {p:.3}; {trim_note}"),
        },
    }
}

/// Evaluates the four computable criteria and combines them.
pub fn inclusion_report<T: Real>(
    b: &SchurRow<T>,
    scalar_mate: &TaylorSeries<T>,
    phi: &SymbolPhi<T>,
    params: &InclusionParams,
) -> Result<InclusionReport> {
    let crit_supnorm = monomial_growth(phi)?;
    let phi_mags: Vec<T> = phi.coeffs().iter().map(|c| c.frobenius_norm()).collect();
    let crit_phi_h2 = summability(&phi_mags, "c_j");
    let degree = params.degree;
    let inv_a = scalar_mate.reciprocal(degree, lit(params.eps_floor))?;
    let comps = b.coefficients_to(degree)?;
    let ratio: Vec<TaylorSeries<T>> = comps
        .iter()
        .map(|c| c.multiply_truncated(&inv_a, degree))
        .collect();
    let ba_mags: Vec<T> = (0..=degree)
        .map(|j| {
            ratio
                .iter()
                .fold(T::zero(), |s, c| s + c.coeff(j).norm_sqr())
                .sqrt()
        })
        .collect();
    let crit_b_over_a_h2 = summability(&ba_mags, "coefficients of B/a");
    let crit_inv_l1 = inverse_integrability(b, params);
    let (verdict, inconclusive) = combine(&[
        crit_supnorm.holds,
        crit_phi_h2.holds,
        crit_b_over_a_h2.holds,
        crit_inv_l1.holds,
    ]);
    Ok(InclusionReport {
        crit_supnorm,
        crit_phi_h2,
        crit_b_over_a_h2,
        crit_inv_l1,
        verdict,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_combination() {
        assert_eq!(
            combine(&[Some(true), Some(true)]),
            (Verdict::ContainsHinf, false)
        );
        assert_eq!(combine(&[Some(false), None]), (Verdict::NotContains, true));
        assert_eq!(combine(&[Some(true), Some(false)]).0, Verdict::Inconsistent);
        assert_eq!(combine(&[None, None]).0, Verdict::Inconsistent);
    }

    #[test]
    fn golden_section_and_exponent() {
        let (x, fx) = refine_minimum(|t| (t - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && fx < 1e-14);
        let p = local_exponent(|t: f64| (t - 1.0).abs().powf(1.5), 1.0);
        assert!((p - 1.5).abs() < 1e-10);
    }
}
