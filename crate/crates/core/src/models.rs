//! Canonical symbols: the cube-root-of-unity family with closed-form mates,
//! the zero symbol, and rational symbols factored numerically.

use crate::config::Config;
use crate::error::{HbError, Result};
use crate::factorization::{
    factor_symbol, factorization_residuals, normalize_matrix, normalize_scalar, Residuals,
};
use crate::hb::{phi_coefficients, PhiSource, RationalRow, SchurRow, SymbolPhi};
use crate::json::{entry, from_entry, matrix_from_json, matrix_to_json, Entry, SeriesJson};
use crate::linalg::CMat;
use crate::parse::{parse_polynomial, parse_rational, Rational};
use crate::scalar::{cone, lit, to_f64, unit, Cx, Real};
use crate::series::{geometric_tail_fit, MatrixTaylorSeries, TaylorSeries};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const MODEL_VERSION: u32 = 1;

/// How the mates of a model were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Factored,
}

/// The inner function `u` feeding the cube-root family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InnerSpec {
    /// `u(z) = z^power`.
    Monomial { power: usize },
    /// `u(z) = Π (z − α)/(1 − ᾱz)` over the listed zeros `[re, im]`.
    Blaschke { zeros: Vec<Entry> },
}

impl InnerSpec {
    /// Numerator and denominator polynomials of `u`.
    pub fn polynomials<T: Real>(&self) -> Result<(TaylorSeries<T>, TaylorSeries<T>)> {
        match self {
            InnerSpec::Monomial { power: 0 } => Err(HbError::Hypothesis(
                "u must be a non-constant inner function".into(),
            )),
            InnerSpec::Monomial { power } => Ok((
                TaylorSeries::monomial(*power),
                TaylorSeries::constant(cone()),
            )),
            InnerSpec::Blaschke { zeros } if zeros.is_empty() => Err(HbError::Hypothesis(
                "u must be a non-constant inner function".into(),
            )),
            InnerSpec::Blaschke { zeros } => {
                let mut num = TaylorSeries::constant(cone());
                let mut den = TaylorSeries::constant(cone());
                for z in zeros {
                    let alpha: Cx<T> = from_entry(z);
                    if !(alpha.norm() < T::one()) {
                        return Err(HbError::Domain {
                            modulus: to_f64(alpha.norm()),
                        });
                    }
                    num = num.multiply(&TaylorSeries::new(vec![-alpha, cone()]));
                    den = den.multiply(&TaylorSeries::new(vec![cone(), -alpha.conj()]));
                }
                Ok((num, den))
            }
        }
    }

    /// Parses `z`, `z^k` or `blaschke(α, …)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t
            .strip_prefix("blaschke(")
            .and_then(|s| s.strip_suffix(')'))
        {
            let zeros = split_top_level(inner, ',')
                .iter()
                .map(|z| {
                    let p = parse_polynomial::<f64>(z)?;
                    if p.degree() > 0 {
                        return Err(HbError::Invalid(format!(
                            "Blaschke zero {z:?} must be a constant"
                        )));
                    }
                    Ok(entry(p.coeff(0)))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(InnerSpec::Blaschke { zeros });
        }
        let p = parse_polynomial::<f64>(&t)?;
        let power = p.degree();
        let is_monomial = p.coeffs().iter().enumerate().all(|(j, c)| {
            if j == power {
                c.re == 1.0 && c.im == 0.0
            } else {
                c.re == 0.0 && c.im == 0.0
            }
        });
        if !is_monomial {
            return Err(HbError::Invalid(format!(
                "u = {text:?} is neither z^k nor blaschke(...)"
            )));
        }
        Ok(InnerSpec::Monomial { power })
    }
}

/// Known values of the family at `u(z) = z`, used as expected results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    /// `‖z^m‖² = offset + slope·m`.
    pub monomial_offset: f64,
    pub monomial_slope: f64,
    /// `c_0` in the gauge of the closed form.
    pub first_phi_coeff: Vec<Entry>,
    /// `c_m c_m*` for `m ≥ 1`.
    pub phi_coeff_norm_sq: f64,
    /// `‖b_i‖²`.
    pub symbol_norm_sq: Vec<f64>,
    /// `‖L b_i‖²`.
    pub shifted_symbol_norm_sq: Vec<f64>,
    /// `K_B(0, 0)`.
    pub kernel_at_origin: f64,
}

/// A symbol with its mates and `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelInstance<T> {
    pub row: SchurRow<T>,
    pub scalar_mate: TaylorSeries<T>,
    pub matrix_mate: MatrixTaylorSeries<T>,
    pub phi: SymbolPhi<T>,
    pub provenance: Provenance,
    pub inner_u: Option<InnerSpec>,
    /// Constant unitary `G` applied to the closed-form mate (`A = G·A_closed`).
    pub gauge: Option<CMat<T>>,
    pub reference: Option<ReferenceValues>,
}

impl<T: Real> ModelInstance<T> {
    pub fn n(&self) -> usize {
        self.row.n()
    }

    /// Boundary residuals of the stored mates on the configured grid.
    pub fn residuals(&self, cfg: &Config) -> Result<Residuals> {
        factorization_residuals(
            &self.row,
            &self.scalar_mate,
            &self.matrix_mate,
            cfg.grid,
            cfg.eps_floor,
        )
    }

    /// `φ` in the gauge of the closed-form mate (identity gauge if none).
    pub fn closed_form_phi(&self) -> SymbolPhi<T> {
        match &self.gauge {
            Some(g) => self.phi.regauged(&g.adjoint()),
            None => self.phi.clone(),
        }
    }

    /// The same model after `A ↦ UA`, with `φ` transformed to match.
    pub fn regauged(&self, unitary: &CMat<T>) -> Result<Self> {
        let matrix_mate = self.matrix_mate.left_mul_const(unitary)?;
        let gauge = match &self.gauge {
            Some(g) => unitary * g,
            None => unitary.clone(),
        };
        Ok(ModelInstance {
            matrix_mate,
            phi: self.phi.regauged(unitary),
            gauge: Some(gauge),
            ..self.clone()
        })
    }

    pub fn cast<S: Real>(&self) -> ModelInstance<S> {
        ModelInstance {
            row: self.row.cast(),
            scalar_mate: self.scalar_mate.cast(),
            matrix_mate: self.matrix_mate.cast(),
            phi: self.phi.cast(),
            provenance: self.provenance,
            inner_u: self.inner_u.clone(),
            gauge: self
                .gauge
                .as_ref()
                .map(|g| MatrixTaylorSeries::constant(g.clone()).cast::<S>().coeff(0)),
            reference: self.reference.clone(),
        }
    }
}

/// The primitive cube root of unity, with its defining identities checked.
pub fn omega<T: Real>() -> Cx<T> {
    let w = unit::<T>(lit::<T>(2.0) * T::PI() / lit(3.0));
    let tol = T::epsilon() * lit(8.0);
    assert!(
        (cone::<T>() + w + w * w).norm() <= tol,
        "1 + ω + ω² must vanish"
    );
    assert!((w * w - w.conj()).norm() <= tol, "ω² must equal conj(ω)");
    w
}

/// Series of `num / den` to `degree`, with the decay hint of `1/den`.
fn rational_series<T: Real>(
    num: &TaylorSeries<T>,
    den: &TaylorSeries<T>,
    degree: usize,
    floor: T,
) -> Result<TaylorSeries<T>> {
    if den.degree() == 0 {
        return Ok(num.scale(cone::<T>() / den.coeff(0)));
    }
    let inv = den.reciprocal(degree, floor)?;
    let mags: Vec<T> = inv.coeffs().iter().map(|c| c.norm()).collect();
    let (ratio, _) = geometric_tail_fit(&mags, T::epsilon() * lit(10.0));
    let out = num.multiply_truncated(&inv, degree);
    Ok(if ratio > T::zero() && ratio < T::one() {
        out.with_decay_hint(T::one() / ratio)
    } else {
        out
    })
}

/// The family `b_j = (1 + ω^{j−1}u)/√6`, `a = (1 + ω²u)/√6`,
/// `A = ((1−u, 1−ωu), (√2, √2ω²))/√6`, `φ = ((ω−u)/(ω+u), −√2ω²u/(ω+u))`.
///
/// The stored mates are normalised to `a(0) > 0` and `A(0) ≻ 0`; the
/// unitary that does this is kept in `gauge`.
pub fn example_omega_family<T: Real>(u: &InnerSpec, cfg: &Config) -> Result<ModelInstance<T>> {
    cfg.validate()?;
    let (p, q) = u.polynomials::<T>()?;
    let w = omega::<T>();
    let w2 = w * w;
    let root6 = lit::<T>(6.0).sqrt();
    let root2 = lit::<T>(2.0).sqrt();
    let inv6 = Cx::new(T::one() / root6, T::zero());
    let degree = cfg.degree;
    let floor = lit::<T>(cfg.eps_floor);
    let numerators: Vec<TaylorSeries<T>> = [cone(), w]
        .iter()
        .map(|&c| q.add(&p.scale(c)).scale(inv6))
        .collect();
    let row = if q.degree() == 0 {
        SchurRow::new(numerators, cfg)?
    } else {
        SchurRow::rational(numerators, q.clone(), cfg)?
    };

    let a_closed = rational_series(&q.add(&p.scale(w2)).scale(inv6), &q, degree, floor)?;
    let scalar_mate = normalize_scalar(&a_closed);

    let constant = |c: Cx<T>| TaylorSeries::constant(c * inv6);
    let entries = [
        rational_series(&q.sub(&p).scale(inv6), &q, degree, floor)?,
        rational_series(&q.sub(&p.scale(w)).scale(inv6), &q, degree, floor)?,
        constant(Cx::new(root2, T::zero())),
        constant(w2.scale(root2)),
    ];
    let a_matrix = MatrixTaylorSeries::from_entries(2, 2, &entries);
    let (matrix_mate, gauge) = normalize_matrix(&a_matrix)?;

    // φ = ((ωq − p), −√2ω²p) / (ωq + p).
    let den = q.scale(w).add(&p);
    let inv = den.reciprocal(degree, floor)?;
    let first = q.scale(w).sub(&p).multiply_truncated(&inv, degree);
    let second = p.scale(-w2.scale(root2)).multiply_truncated(&inv, degree);
    let coeffs: Vec<CMat<T>> = (0..=degree)
        .map(|j| CMat::row_vector(&[first.coeff(j), second.coeff(j)]))
        .collect();
    let phi = SymbolPhi::from_coeffs(coeffs, PhiSource::ClosedForm)?.regauged(&gauge);
    let phi = {
        // Tag the verification residual for parity with computed symbols.
        let check = phi.series().multiply_truncated(&matrix_mate, degree)?;
        let row_series = row.row_series().resized(degree);
        SymbolPhi::from_parts(
            phi.coeffs().to_vec(),
            phi.tail_ratio(),
            phi.tail_prefactor(),
            PhiSource::ClosedForm,
            check.max_abs_diff(&row_series),
            None,
        )
    };

    let reference = (*u == InnerSpec::Monomial { power: 1 }).then(|| ReferenceValues {
        monomial_offset: 2.0,
        monomial_slope: 6.0,
        first_phi_coeff: vec![[1.0, 0.0], [0.0, 0.0]],
        phi_coeff_norm_sq: 6.0,
        symbol_norm_sq: vec![2.0, 2.0],
        shifted_symbol_norm_sq: vec![1.0 / 3.0, 1.0 / 3.0],
        kernel_at_origin: 2.0 / 3.0,
    });
    Ok(ModelInstance {
        row,
        scalar_mate,
        matrix_mate,
        phi,
        provenance: Provenance::ClosedForm,
        inner_u: Some(u.clone()),
        gauge: Some(gauge),
        reference,
    })
}

/// `B ≡ 0` with `a = 1`, `A = I` and `φ = 0`, for which `H(B) = H²`.
pub fn zero_symbol<T: Real>(n: usize, cfg: &Config) -> Result<ModelInstance<T>> {
    if n == 0 {
        return Err(HbError::Invalid("the zero symbol needs n >= 1".into()));
    }
    let row = SchurRow::new(vec![TaylorSeries::zero(0); n], cfg)?.suppress_independence_warning();
    Ok(ModelInstance {
        row,
        scalar_mate: TaylorSeries::constant(cone()),
        matrix_mate: MatrixTaylorSeries::identity(n),
        phi: SymbolPhi::zero(n, cfg.degree),
        provenance: Provenance::ClosedForm,
        inner_u: None,
        gauge: None,
        reference: None,
    })
}

/// Admits a row of rational functions and computes its mates numerically.
pub fn rational_symbol<T: Real>(
    components: &[Rational<T>],
    cfg: &Config,
) -> Result<ModelInstance<T>> {
    if components.is_empty() {
        return Err(HbError::Invalid(
            "a rational symbol needs at least one component".into(),
        ));
    }
    // Common denominator: the product of the non-constant denominators.
    let mut common = TaylorSeries::constant(cone::<T>());
    for c in components {
        if c.denominator.degree() > 0 {
            common = common.multiply(&c.denominator);
        }
    }
    let numerators: Vec<TaylorSeries<T>> = components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut p = if c.denominator.degree() > 0 {
                c.numerator.clone()
            } else {
                c.numerator.scale(cone::<T>() / c.denominator.coeff(0))
            };
            for (j, other) in components.iter().enumerate() {
                if j != i && other.denominator.degree() > 0 {
                    p = p.multiply(&other.denominator);
                }
            }
            p
        })
        .collect();
    let row = if common.degree() == 0 {
        SchurRow::new(numerators, cfg)?
    } else {
        SchurRow::rational(numerators, common, cfg)?
    };
    from_row(row, cfg)
}

/// Factors an admitted row and computes `φ` from the numerical mate.
pub fn from_row<T: Real>(row: SchurRow<T>, cfg: &Config) -> Result<ModelInstance<T>> {
    let result = factor_symbol(&row, cfg)?;
    let phi = phi_coefficients(&row, &result.matrix_mate, cfg.degree, cfg.eps_floor)?;
    Ok(ModelInstance {
        row,
        scalar_mate: result.scalar_mate,
        matrix_mate: result.matrix_mate,
        phi,
        provenance: Provenance::Factored,
        inner_u: None,
        gauge: None,
        reference: None,
    })
}

/// Splits on `sep` outside parentheses.
fn split_top_level(text: &str, sep: char) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0i32;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(String::new());
        } else {
            out.last_mut().expect("nonempty").push(ch);
        }
    }
    out
}

/// A model named on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    /// `example-omega:u=z`, `example-omega:u=z^2`, `example-omega:u=blaschke(0.5)`.
    ExampleOmega(InnerSpec),
    /// `zero:n=2`.
    Zero(usize),
    /// `rational:(z+0.2)/2;z^2/3`, components separated by `;`.
    Rational(Vec<String>),
    /// `file:path/to/model.json`.
    File(PathBuf),
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| {
            HbError::Invalid(format!("model {text:?} must look like kind:arguments"))
        })?;
        match kind {
            "example-omega" => {
                let u = rest
                    .strip_prefix("u=")
                    .ok_or_else(|| HbError::Invalid("example-omega expects u=...".into()))?;
                Ok(ModelSpec::ExampleOmega(InnerSpec::parse(u)?))
            }
            "zero" => {
                let n = rest
                    .strip_prefix("n=")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| HbError::Invalid("zero expects n=<integer>".into()))?;
                Ok(ModelSpec::Zero(n))
            }
            "rational" => {
                let parts = split_top_level(rest, ';');
                if parts.iter().any(|p| p.trim().is_empty()) {
                    return Err(HbError::Invalid("empty rational component".into()));
                }
                Ok(ModelSpec::Rational(parts))
            }
            "file" => Ok(ModelSpec::File(PathBuf::from(rest))),
            other => Err(HbError::Invalid(format!("unknown model kind {other:?}"))),
        }
    }

    pub fn build<T: Real>(&self, cfg: &Config) -> Result<ModelInstance<T>> {
        match self {
            ModelSpec::ExampleOmega(u) => example_omega_family(u, cfg),
            ModelSpec::Zero(n) => zero_symbol(*n, cfg),
            ModelSpec::Rational(parts) => {
                let comps = parts
                    .iter()
                    .map(|p| parse_rational::<T>(p))
                    .collect::<Result<Vec<_>>>()?;
                rational_symbol(&comps, cfg)
            }
            ModelSpec::File(path) => load_model(path, cfg),
        }
    }
}

/// The models every acceptance check runs on, by name.
pub fn corpus_specs() -> Vec<&'static str> {
    vec![
        "zero:n=2",
        "example-omega:u=z",
        "example-omega:u=z^2",
        "example-omega:u=blaschke(0.5)",
        "rational:z/2;1/2",
        "rational:(z+0.2)/2;z^2/3",
        "rational:0.4/(1-0.5z);0.3z/(1-0.3z)",
    ]
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    numerators: Vec<SeriesJson>,
    denominator: SeriesJson,
}

#[derive(Serialize, Deserialize)]
struct PhiJson {
    c: Vec<Vec<Entry>>,
    tail_ratio: f64,
    tail_prefactor: f64,
    source: PhiSource,
    verification_residual: f64,
    #[serde(default)]
    warning: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    version: u32,
    n: usize,
    #[serde(rename = "B")]
    b: Vec<SeriesJson>,
    #[serde(rename = "B_rational", default)]
    b_rational: Option<RationalJson>,
    #[serde(default)]
    warnings: Vec<String>,
    a: SeriesJson,
    #[serde(rename = "A")]
    matrix: SeriesJson,
    phi: PhiJson,
    provenance: Provenance,
    inner_u: Option<InnerSpec>,
    #[serde(default)]
    gauge: Option<Vec<Entry>>,
    #[serde(default)]
    reference: Option<ReferenceValues>,
}

/// JSON text of a model.
pub fn model_to_json<T: Real>(model: &ModelInstance<T>) -> Result<String> {
    let doc = ModelJson {
        version: MODEL_VERSION,
        n: model.n(),
        b: model
            .row
            .components()
            .iter()
            .map(SeriesJson::from_taylor)
            .collect(),
        b_rational: model.row.rational_form().map(|r| RationalJson {
            numerators: r.numerators.iter().map(SeriesJson::from_taylor).collect(),
            denominator: SeriesJson::from_taylor(&r.denominator),
        }),
        warnings: model.row.warnings().to_vec(),
        a: SeriesJson::from_taylor(&model.scalar_mate),
        matrix: SeriesJson::from_matrix_series(&model.matrix_mate),
        phi: PhiJson {
            c: model.phi.coeffs().iter().map(matrix_to_json).collect(),
            tail_ratio: to_f64(model.phi.tail_ratio()),
            tail_prefactor: to_f64(model.phi.tail_prefactor()),
            source: model.phi.source(),
            verification_residual: to_f64(model.phi.verification_residual()),
            warning: model.phi.warning().map(str::to_owned),
        },
        provenance: model.provenance,
        inner_u: model.inner_u.clone(),
        gauge: model.gauge.as_ref().map(matrix_to_json),
        reference: model.reference.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Rebuilds a model from JSON text, re-validating the row.
pub fn model_from_json<T: Real>(text: &str, cfg: &Config) -> Result<ModelInstance<T>> {
    let doc: ModelJson = serde_json::from_str(text)?;
    if doc.version != MODEL_VERSION {
        return Err(HbError::Schema(format!(
            "unknown model version {}",
            doc.version
        )));
    }
    let n = doc.n;
    if n == 0 || doc.b.len() != n {
        return Err(HbError::Schema(format!(
            "n = {n} but {} components of B",
            doc.b.len()
        )));
    }
    let components = doc
        .b
        .iter()
        .map(|s| s.to_taylor::<T>())
        .collect::<Result<Vec<_>>>()?;
    let rational = match &doc.b_rational {
        Some(r) => Some(RationalRow {
            numerators: r
                .numerators
                .iter()
                .map(|s| s.to_taylor())
                .collect::<Result<Vec<_>>>()?,
            denominator: r.denominator.to_taylor()?,
        }),
        None => None,
    };
    if rational.as_ref().is_some_and(|r| r.numerators.len() != n) {
        return Err(HbError::Schema(
            "B_rational has the wrong number of numerators".into(),
        ));
    }
    let mut row = SchurRow::assemble(components, rational, cfg)?;
    row.set_warnings(doc.warnings);
    let scalar_mate = doc.a.to_taylor()?;
    let matrix_mate = doc.matrix.to_matrix_series()?;
    if matrix_mate.shape() != (n, n) {
        return Err(HbError::Schema(format!(
            "A is {:?}, expected {n}x{n}",
            matrix_mate.shape()
        )));
    }
    if doc.phi.c.is_empty() {
        return Err(HbError::Schema("phi.c is empty".into()));
    }
    let coeffs = doc
        .phi
        .c
        .iter()
        .map(|c| matrix_from_json(1, n, c))
        .collect::<Result<Vec<_>>>()?;
    let phi = SymbolPhi::from_parts(
        coeffs,
        lit(doc.phi.tail_ratio),
        lit(doc.phi.tail_prefactor),
        doc.phi.source,
        lit(doc.phi.verification_residual),
        doc.phi.warning,
    );
    let gauge = doc
        .gauge
        .as_deref()
        .map(|g| matrix_from_json(n, n, g))
        .transpose()?;
    Ok(ModelInstance {
        row,
        scalar_mate,
        matrix_mate,
        phi,
        provenance: doc.provenance,
        inner_u: doc.inner_u,
        gauge,
        reference: doc.reference,
    })
}

pub fn save_model<T: Real>(model: &ModelInstance<T>, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)?)?;
    Ok(())
}

pub fn load_model<T: Real>(path: &Path, cfg: &Config) -> Result<ModelInstance<T>> {
    model_from_json(&std::fs::read_to_string(path)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hb::monomial_norm;

    fn small() -> Config {
        Config::default().with_degree(64).with_grid(512)
    }

    #[test]
    fn example_closed_form() {
        let cfg = small();
        let m = example_omega_family::<f64>(&InnerSpec::Monomial { power: 1 }, &cfg).unwrap();
        let phi = m.closed_form_phi();
        assert!((phi.coeff(0)[(0, 0)] - cone()).norm() < 1e-14);
        assert!(phi.coeff(0)[(0, 1)].norm() < 1e-14);
        for j in 1..=40 {
            let c = phi.coeff(j).frobenius_norm();
            assert!((c * c - 6.0).abs() < 1e-12);
            assert!((monomial_norm(j, &m.phi).unwrap() - (2.0 + 6.0 * j as f64)).abs() < 1e-10);
        }
        let r = m.residuals(&cfg).unwrap();
        assert!(
            r.scalar < 1e-14 && r.matrix < 1e-14 && r.relation < 1e-10,
            "{r:?}"
        );
        assert!(m.phi.verification_residual() < 1e-12);
        assert!(m.matrix_mate.coeff(0).skew_defect() < 1e-15);
        assert!(m.scalar_mate.coeff(0).im == 0.0 && m.scalar_mate.coeff(0).re > 0.0);
    }

    #[test]
    fn cube_root_identity_on_grid() {
        let w = omega::<f64>();
        for k in 0..64 {
            let u = crate::grid::node::<f64>(k, 64);
            let s: f64 = [cone(), w, w * w]
                .iter()
                .map(|&c| (cone::<f64>() + c * u).norm_sqr())
                .sum();
            assert!((s - 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn specs_parse() {
        assert_eq!(ModelSpec::parse("zero:n=2").unwrap(), ModelSpec::Zero(2));
        assert_eq!(
            ModelSpec::parse("example-omega:u=z^2").unwrap(),
            ModelSpec::ExampleOmega(InnerSpec::Monomial { power: 2 })
        );
        assert_eq!(
            ModelSpec::parse("example-omega:u=blaschke(0.5)").unwrap(),
            ModelSpec::ExampleOmega(InnerSpec::Blaschke {
                zeros: vec![[0.5, 0.0]]
            })
        );
        assert_eq!(
            ModelSpec::parse("rational:0.4/(1-0.5z);0.3z/(1-0.3z)").unwrap(),
            ModelSpec::Rational(vec!["0.4/(1-0.5z)".into(), "0.3z/(1-0.3z)".into()])
        );
        let constant = ModelSpec::parse("example-omega:u=1").unwrap();
        assert!(matches!(
            constant.build::<f64>(&small()),
            Err(HbError::Hypothesis(_))
        ));
        assert!(ModelSpec::parse("nonsense").is_err());
        assert!(ModelSpec::parse("example-omega:u=2z").is_err());
    }

    #[test]
    fn constant_inner_rejected() {
        let err =
            example_omega_family::<f64>(&InnerSpec::Monomial { power: 0 }, &small()).unwrap_err();
        assert!(matches!(err, HbError::Hypothesis(_)));
        let err = example_omega_family::<f64>(&InnerSpec::Blaschke { zeros: vec![] }, &small())
            .unwrap_err();
        assert!(matches!(err, HbError::Hypothesis(_)));
    }

    #[test]
    fn zero_symbol_shape() {
        let m = zero_symbol::<f64>(2, &small()).unwrap();
        assert!(m.row.warnings().is_empty());
        assert!(!m.row.independence_ok());
        assert_eq!(monomial_norm(7, &m.phi).unwrap(), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = small();
        for model in [
            zero_symbol::<f64>(2, &cfg).unwrap(),
            example_omega_family::<f64>(&InnerSpec::Monomial { power: 1 }, &cfg).unwrap(),
            example_omega_family::<f64>(
                &InnerSpec::Blaschke {
                    zeros: vec![[0.5, 0.0]],
                },
                &cfg,
            )
            .unwrap(),
        ] {
            let text = model_to_json(&model).unwrap();
            let back = model_from_json::<f64>(&text, &cfg).unwrap();
            assert_eq!(back, model);
            let cut = &text[..text.len() / 2];
            assert!(matches!(
                model_from_json::<f64>(cut, &cfg),
                Err(HbError::Schema(_))
            ));
        }
        let text = model_to_json(&zero_symbol::<f64>(1, &cfg).unwrap())
            .unwrap()
            .replace("\"version\": 1", "\"version\": 7");
        assert!(matches!(
            model_from_json::<f64>(&text, &cfg),
            Err(HbError::Schema(_))
        ));
    }
}
