use crate::config::Config;
use crate::error::{HbError, Result};
use crate::grid::{synthesize, BoundaryGrid};
use crate::linalg::CMat;
use crate::scalar::{cone, from_usize, lit, to_f64, Cx, Real};
use crate::series::{check_interior, geometric_tail_fit, MatrixTaylorSeries, TaylorSeries};

/// Rational description `B = P / q` with polynomial numerators and a
/// denominator normalised to `q(0) = 1` with no zeros in the closed disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRow<T> {
    pub numerators: Vec<TaylorSeries<T>>,
    pub denominator: TaylorSeries<T>,
}

/// A row-valued Schur function `B = (b_1, …, b_n)` with the validation
/// data collected when it was admitted.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurRow<T> {
    components: Vec<TaylorSeries<T>>,
    rational: Option<RationalRow<T>>,
    boundary_sup: T,
    independence_ok: bool,
    szego_ok: bool,
    trimmed_fraction: T,
    warnings: Vec<String>,
}

/// Slack allowed above 1 for the boundary supremum.
pub const SCHUR_SLACK: f64 = 1e-10;

impl<T: Real> SchurRow<T> {
    /// Admits a row given by power series. Exact polynomials keep their
    /// rational description with denominator 1.
    pub fn new(components: Vec<TaylorSeries<T>>, cfg: &Config) -> Result<Self> {
        if components.is_empty() {
            return Err(HbError::Invalid(
                "a Schur row needs at least one component".into(),
            ));
        }
        let rational = if components.iter().all(|c| c.is_polynomial()) {
            Some(RationalRow {
                numerators: components.clone(),
                denominator: TaylorSeries::constant(cone()),
            })
        } else {
            None
        };
        Self::assemble(components, rational, cfg)
    }

    /// Admits `B = P / q`, expanding each component to the configured degree.
    pub fn rational(
        numerators: Vec<TaylorSeries<T>>,
        denominator: TaylorSeries<T>,
        cfg: &Config,
    ) -> Result<Self> {
        if numerators.is_empty() {
            return Err(HbError::Invalid(
                "a Schur row needs at least one component".into(),
            ));
        }
        let q0 = denominator.coeff(0);
        if !(q0.norm() > lit(cfg.eps_floor)) {
            return Err(HbError::NotInvertibleAtOrigin(to_f64(q0.norm())));
        }
        let scale = cone::<T>() / q0;
        let numerators: Vec<TaylorSeries<T>> = numerators
            .iter()
            .map(|p| p.scale(scale).without_decay_hint())
            .collect();
        let denominator = denominator.scale(scale).without_decay_hint();
        check_denominator(&denominator, cfg.grid)?;
        let inv = denominator.reciprocal(cfg.degree, lit(cfg.eps_floor))?;
        let mags: Vec<T> = inv.coeffs().iter().map(|c| c.norm()).collect();
        let (ratio, _) = geometric_tail_fit(&mags, T::epsilon() * lit(10.0));
        let components = numerators
            .iter()
            .map(|p| {
                let s = p.multiply_truncated(&inv, cfg.degree);
                if denominator.degree() == 0 || ratio == T::zero() {
                    s
                } else {
                    s.with_decay_hint(T::one() / ratio.min(T::one()))
                }
            })
            .collect();
        Self::assemble(
            components,
            Some(RationalRow {
                numerators,
                denominator,
            }),
            cfg,
        )
    }

    pub(crate) fn assemble(
        components: Vec<TaylorSeries<T>>,
        rational: Option<RationalRow<T>>,
        cfg: &Config,
    ) -> Result<Self> {
        let mut row = SchurRow {
            components,
            rational,
            boundary_sup: T::zero(),
            independence_ok: false,
            szego_ok: false,
            trimmed_fraction: T::zero(),
            warnings: Vec::new(),
        };
        let max_degree = row.numerator_degree();
        let size = cfg.grid.max(8 * (max_degree + 1)).next_power_of_two();
        let trace = row.boundary_trace(size);
        let eps_deg = lit::<T>(cfg.eps_deg);
        let mut sup = T::zero();
        let mut trimmed = 0usize;
        for k in 0..size {
            let b = trace.sample(k);
            let bb = b.as_slice().iter().fold(T::zero(), |s, z| s + z.norm_sqr());
            sup = sup.max(bb.sqrt());
            if T::one() - bb < eps_deg {
                trimmed += 1;
            }
        }
        row.boundary_sup = sup;
        if sup > T::one() + lit(SCHUR_SLACK) {
            return Err(HbError::SchurViolation(to_f64(sup)));
        }
        row.trimmed_fraction = from_usize::<T>(trimmed) / from_usize(size);
        row.szego_ok = row.trimmed_fraction <= lit(cfg.trim_cap);
        if !row.szego_ok {
            row.warnings.push(format!(
                "1 - BB* falls below {:.1e} on {:.1}% of the boundary grid; the Szegő condition is not met numerically",
                cfg.eps_deg,
                100.0 * to_f64(row.trimmed_fraction)
            ));
        }
        row.independence_ok = coefficients_independent(&row.components);
        if !row.independence_ok {
            row.warnings
                .push("components are linearly dependent".into());
        }
        Ok(row)
    }

    pub(crate) fn set_warnings(&mut self, warnings: Vec<String>) {
        self.warnings = warnings;
    }

    /// Drops the dependence warning (used by the canonical zero symbol).
    pub fn suppress_independence_warning(mut self) -> Self {
        self.warnings.retain(|w| !w.contains("linearly dependent"));
        self
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[TaylorSeries<T>] {
        &self.components
    }

    /// Component `b_i` with the 1-based index used throughout the formulas.
    pub fn component(&self, i: usize) -> Result<&TaylorSeries<T>> {
        if i == 0 || i > self.n() {
            return Err(HbError::Index {
                index: i,
                n: self.n(),
            });
        }
        Ok(&self.components[i - 1])
    }

    pub fn rational_form(&self) -> Option<&RationalRow<T>> {
        self.rational.as_ref()
    }

    pub fn boundary_sup(&self) -> T {
        self.boundary_sup
    }

    pub fn independence_ok(&self) -> bool {
        self.independence_ok
    }

    pub fn szego_ok(&self) -> bool {
        self.szego_ok
    }

    pub fn trimmed_fraction(&self) -> T {
        self.trimmed_fraction
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// True when every component is identically zero.
    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.coeffs().iter().all(|z| z.norm() == T::zero()))
    }

    /// The `1 × n` series `B`.
    pub fn row_series(&self) -> MatrixTaylorSeries<T> {
        MatrixTaylorSeries::from_row(&self.components)
    }

    /// Largest degree of a numerator (or of a component without rational form).
    pub fn numerator_degree(&self) -> usize {
        match &self.rational {
            Some(r) => r
                .numerators
                .iter()
                .chain(std::iter::once(&r.denominator))
                .map(|p| p.degree())
                .max()
                .unwrap_or(0),
            None => self
                .components
                .iter()
                .map(|c| c.degree())
                .max()
                .unwrap_or(0),
        }
    }

    /// Degree of the denominator `q` (zero for polynomial rows).
    pub fn denominator_degree(&self) -> usize {
        self.rational.as_ref().map_or(0, |r| r.denominator.degree())
    }

    /// `B(λ)` as a `1 × n` matrix, exact for rational rows.
    pub fn evaluate(&self, lambda: Cx<T>) -> Result<CMat<T>> {
        check_interior(lambda)?;
        match &self.rational {
            Some(r) => {
                let q = r.denominator.evaluate_unchecked(lambda);
                Ok(CMat::row_vector(
                    &r.numerators
                        .iter()
                        .map(|p| p.evaluate_unchecked(lambda) / q)
                        .collect::<Vec<_>>(),
                ))
            }
            None => {
                let mut v = Vec::with_capacity(self.n());
                for c in &self.components {
                    v.push(c.evaluate(lambda)?);
                }
                Ok(CMat::row_vector(&v))
            }
        }
    }

    /// `B(e^{iθ})`, exact for rational rows and by truncation otherwise.
    pub fn evaluate_on_circle(&self, theta: T) -> CMat<T> {
        let z = crate::scalar::unit(theta);
        match &self.rational {
            Some(r) => {
                let q = r.denominator.evaluate_unchecked(z);
                CMat::row_vector(
                    &r.numerators
                        .iter()
                        .map(|p| p.evaluate_unchecked(z) / q)
                        .collect::<Vec<_>>(),
                )
            }
            None => CMat::row_vector(
                &self
                    .components
                    .iter()
                    .map(|c| c.evaluate_unchecked(z))
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Taylor coefficients of the components to `degree`, recomputed from
    /// the rational form when there is one.
    pub fn coefficients_to(&self, degree: usize) -> Result<Vec<TaylorSeries<T>>> {
        match &self.rational {
            Some(r) => {
                let inv = r.denominator.reciprocal(degree, T::epsilon())?;
                Ok(r.numerators
                    .iter()
                    .map(|p| p.multiply_truncated(&inv, degree))
                    .collect())
            }
            None => Ok(self.components.iter().map(|c| c.resized(degree)).collect()),
        }
    }

    /// Boundary samples of `B` on the `size`-point grid (exact for rational rows).
    pub fn boundary_trace(&self, size: usize) -> BoundaryGrid<T> {
        match &self.rational {
            Some(r) => {
                let num = synthesize(&MatrixTaylorSeries::from_row(&r.numerators), size);
                let den = synthesize(&r.denominator.to_matrix_series(), size);
                let samples: Vec<CMat<T>> = (0..size)
                    .map(|k| num.sample(k).scale(cone::<T>() / den.sample(k)[(0, 0)]))
                    .collect();
                BoundaryGrid::from_matrices(1, self.n(), &samples).expect("power-of-two grid")
            }
            None => synthesize(&self.row_series(), size),
        }
    }

    pub fn cast<S: Real>(&self) -> SchurRow<S> {
        SchurRow {
            components: self.components.iter().map(|c| c.cast()).collect(),
            rational: self.rational.as_ref().map(|r| RationalRow {
                numerators: r.numerators.iter().map(|p| p.cast()).collect(),
                denominator: r.denominator.cast(),
            }),
            boundary_sup: lit(to_f64(self.boundary_sup)),
            independence_ok: self.independence_ok,
            szego_ok: self.szego_ok,
            trimmed_fraction: lit(to_f64(self.trimmed_fraction)),
            warnings: self.warnings.clone(),
        }
    }
}

/// The denominator must not vanish on the closed disk. A nonvanishing
/// polynomial with `q(0) ≠ 0` has no zeros inside iff the winding number of
/// `q(ζ)` around the origin is zero; the boundary is sampled densely and
/// must stay away from zero as well.
fn check_denominator<T: Real>(q: &TaylorSeries<T>, grid: usize) -> Result<()> {
    if q.degree() == 0 {
        return Ok(());
    }
    let size = grid.max(64 * (q.degree() + 1)).next_power_of_two();
    let trace = synthesize(&q.to_matrix_series(), size);
    let vals = trace.scalar_samples();
    let min = vals.iter().fold(T::infinity(), |m, z| m.min(z.norm()));
    if !(min > lit(1e-8)) {
        return Err(HbError::Hypothesis(
            "denominator vanishes on the unit circle".into(),
        ));
    }
    let mut winding = T::zero();
    for k in 0..size {
        let a = vals[k];
        let b = vals[(k + 1) % size];
        winding = winding + (b / a).arg();
    }
    if crate::scalar::abs(winding) > T::PI() {
        return Err(HbError::Hypothesis(
            "denominator has zeros inside the unit disk".into(),
        ));
    }
    Ok(())
}

/// Rank test on the coefficient matrix `(b̂_i(j))`: the singular value ratio
/// must exceed `1e-10`.
fn coefficients_independent<T: Real>(components: &[TaylorSeries<T>]) -> bool {
    let n = components.len();
    let d = components.iter().map(|c| c.degree()).max().unwrap_or(0);
    let coeffs = CMat::from_fn(n, d + 1, |i, j| components[i].coeff(j));
    let gram = &coeffs * &coeffs.adjoint();
    let (vals, _) = gram.hermitian_eigen();
    let top = vals.last().copied().unwrap_or(T::zero());
    let low = vals.first().copied().unwrap_or(T::zero());
    top > T::zero() && low > top * lit(1e-20)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn admits_and_rejects() {
        let cfg = Config::default().with_degree(32).with_grid(128);
        let half = SchurRow::<f64>::new(
            vec![
                TaylorSeries::from_real(&[0.0, 0.5]),
                TaylorSeries::from_real(&[0.5]),
            ],
            &cfg,
        )
        .unwrap();
        assert!((half.boundary_sup() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(half.szego_ok() && half.independence_ok());
        let inner = SchurRow::<f64>::new(
            vec![TaylorSeries::from_real(&[0.0, 1.0]), TaylorSeries::zero(0)],
            &cfg,
        )
        .unwrap();
        assert!(!inner.szego_ok());
        let big = SchurRow::<f64>::new(vec![TaylorSeries::from_real(&[0.8, 0.8])], &cfg);
        assert!(matches!(big, Err(HbError::SchurViolation(_))));
    }

    #[test]
    fn rational_rows_evaluate_exactly() {
        let cfg = Config::default().with_degree(64).with_grid(256);
        let row = SchurRow::<f64>::rational(
            vec![TaylorSeries::from_real(&[0.4])],
            TaylorSeries::from_real(&[1.0, -0.5]),
            &cfg,
        )
        .unwrap();
        let v = row.evaluate(cx(0.3, 0.0)).unwrap()[(0, 0)];
        assert!((v - cx(0.4 / 0.85, 0.0)).norm() < 1e-15);
        assert!((row.boundary_sup() - 0.8).abs() < 1e-12);
        assert!(row.components()[0].decay_hint().is_some());
        let bad = SchurRow::<f64>::rational(
            vec![TaylorSeries::from_real(&[0.1])],
            TaylorSeries::from_real(&[1.0, -2.0]),
            &cfg,
        );
        assert!(bad.is_err());
    }
}
