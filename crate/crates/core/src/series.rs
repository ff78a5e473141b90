//! Truncated power series with scalar or matrix coefficients.

use crate::error::{HbError, Result};
use crate::linalg::CMat;
use crate::scalar::{cone, creal, czero, from_usize, lit, to_f64, Cx, Real};

/// Scalar power series `Σ coeffs[j] z^j` truncated at `degree = coeffs.len() - 1`.
///
/// `decay_hint = Some(r)` marks the series as a truncation of a function whose
/// coefficients decay like `r^{-j}`; `None` means the coefficients are exact
/// (a polynomial).
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries<T> {
    coeffs: Vec<Cx<T>>,
    decay_hint: Option<T>,
}

impl<T: Real> TaylorSeries<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![czero()]
        } else {
            coeffs
        };
        TaylorSeries {
            coeffs,
            decay_hint: None,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| creal(lit(c))).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![czero(); degree + 1])
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c])
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        let mut c = vec![czero(); m + 1];
        c[m] = cone();
        Self::new(c)
    }

    /// `Σ_{j ≤ degree} r^j z^j`, carrying the decay hint `1/|r|`.
    pub fn geometric(ratio: Cx<T>, degree: usize) -> Self {
        let mut c = Vec::with_capacity(degree + 1);
        let mut p = cone();
        for _ in 0..=degree {
            c.push(p);
            p = p * ratio;
        }
        let r = ratio.norm();
        let s = Self::new(c);
        if r > T::zero() {
            s.with_decay_hint(T::one() / r)
        } else {
            s
        }
    }

    pub fn with_decay_hint(mut self, hint: T) -> Self {
        self.decay_hint = Some(hint);
        self
    }

    pub fn without_decay_hint(mut self) -> Self {
        self.decay_hint = None;
        self
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    #[inline]
    pub fn decay_hint(&self) -> Option<T> {
        self.decay_hint
    }

    /// Coefficient `j`, zero beyond the stored degree.
    #[inline]
    pub fn coeff(&self, j: usize) -> Cx<T> {
        self.coeffs.get(j).copied().unwrap_or_else(czero)
    }

    /// True when every coefficient past the stored degree is known to be zero.
    pub fn is_polynomial(&self) -> bool {
        self.decay_hint.is_none()
    }

    /// Zero-padded or truncated copy with exactly `degree + 1` coefficients.
    pub fn resized(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, czero());
        TaylorSeries {
            coeffs: c,
            decay_hint: self.decay_hint,
        }
    }

    /// Drops trailing coefficients whose modulus is at most `tol`.
    pub fn trimmed(&self, tol: T) -> Self {
        let last = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .unwrap_or(0);
        TaylorSeries {
            coeffs: self.coeffs[..=last].to_vec(),
            decay_hint: self.decay_hint,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let c = (0..=d).map(|j| self.coeff(j) + other.coeff(j)).collect();
        TaylorSeries {
            coeffs: c,
            decay_hint: merge_hint(self.decay_hint, other.decay_hint),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-cone::<T>()))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        TaylorSeries {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            decay_hint: self.decay_hint,
        }
    }

    /// Full Cauchy product.
    pub fn multiply(&self, other: &Self) -> Self {
        self.multiply_truncated(other, self.degree() + other.degree())
    }

    /// Cauchy product truncated at `degree`.
    pub fn multiply_truncated(&self, other: &Self, degree: usize) -> Self {
        let mut out = vec![czero(); degree + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(degree + 1) {
            if a == czero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                out[i + j] = out[i + j] + a * b;
            }
        }
        TaylorSeries {
            coeffs: out,
            decay_hint: merge_hint(self.decay_hint, other.decay_hint),
        }
    }

    /// Multiplication by `z`.
    pub fn shift_up(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(czero());
        c.extend_from_slice(&self.coeffs);
        TaylorSeries {
            coeffs: c,
            decay_hint: self.decay_hint,
        }
    }

    /// The backward shift `(f - f(0)) / z`.
    pub fn backward_shift(&self) -> Self {
        if self.coeffs.len() == 1 {
            return TaylorSeries {
                coeffs: vec![czero()],
                decay_hint: self.decay_hint,
            };
        }
        TaylorSeries {
            coeffs: self.coeffs[1..].to_vec(),
            decay_hint: self.decay_hint,
        }
    }

    /// Horner evaluation at an interior point.
    ///
    /// Refuses `|λ| ≥ 1`, and a truncation whose decay hint does not dominate
    /// `|λ|`.
    pub fn evaluate(&self, lambda: Cx<T>) -> Result<Cx<T>> {
        check_interior(lambda)?;
        if let Some(r) = self.decay_hint {
            if !(r * lambda.norm() < T::one()) {
                return Err(HbError::Precision(format!(
                    "truncated series with decay {:.3e} cannot be evaluated at |λ| = {:.3e}",
                    to_f64(r),
                    to_f64(lambda.norm())
                )));
            }
        }
        Ok(self.evaluate_unchecked(lambda))
    }

    /// Horner evaluation without the domain check (used on the boundary).
    pub fn evaluate_unchecked(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(czero(), |acc, &c| acc * z + c)
    }

    /// Power-series reciprocal to `degree`, by long division.
    pub fn reciprocal(&self, degree: usize, floor: T) -> Result<Self> {
        let d0 = self.coeffs[0];
        if !(d0.norm() > floor) {
            return Err(HbError::NotInvertibleAtOrigin(to_f64(d0.norm())));
        }
        let inv0 = cone::<T>() / d0;
        let mut out = vec![czero(); degree + 1];
        out[0] = inv0;
        for k in 1..=degree {
            let mut s: Cx<T> = czero();
            for j in 1..=k.min(self.degree()) {
                s = s + self.coeffs[j] * out[k - j];
            }
            out[k] = -s * inv0;
        }
        Ok(TaylorSeries {
            coeffs: out,
            decay_hint: None,
        })
    }

    /// Squared `H²` norm of the stored coefficients.
    pub fn hardy_norm_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, c| s + c.norm_sqr())
    }

    pub fn to_matrix_series(&self) -> MatrixTaylorSeries<T> {
        MatrixTaylorSeries::from_coeffs(
            1,
            1,
            self.coeffs.iter().map(|&c| CMat::scalar(c)).collect(),
        )
    }

    pub fn cast<S: Real>(&self) -> TaylorSeries<S> {
        TaylorSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| crate::scalar::cast_cx(c))
                .collect(),
            decay_hint: self.decay_hint.map(|r| lit(to_f64(r))),
        }
    }
}

fn merge_hint<T: Real>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x),
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

pub(crate) fn check_interior<T: Real>(lambda: Cx<T>) -> Result<()> {
    let r = lambda.norm();
    if !(r < T::one()) {
        return Err(HbError::Domain { modulus: to_f64(r) });
    }
    Ok(())
}

/// Power series with `rows × cols` matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTaylorSeries<T> {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMat<T>>,
}

impl<T: Real> MatrixTaylorSeries<T> {
    /// Panics if any coefficient has the wrong shape.
    pub fn from_coeffs(rows: usize, cols: usize, coeffs: Vec<CMat<T>>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.shape() == (rows, cols)),
            "coefficient shape mismatch"
        );
        let coeffs = if coeffs.is_empty() {
            vec![CMat::zeros(rows, cols)]
        } else {
            coeffs
        };
        MatrixTaylorSeries { rows, cols, coeffs }
    }

    pub fn try_from_coeffs(rows: usize, cols: usize, coeffs: Vec<CMat<T>>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != (rows, cols)) {
            return Err(HbError::Shape(format!(
                "coefficient of shape {:?} in a {}x{} series",
                bad.shape(),
                rows,
                cols
            )));
        }
        Ok(Self::from_coeffs(rows, cols, coeffs))
    }

    pub fn zero(rows: usize, cols: usize, degree: usize) -> Self {
        Self::from_coeffs(rows, cols, vec![CMat::zeros(rows, cols); degree + 1])
    }

    pub fn constant(m: CMat<T>) -> Self {
        let (r, c) = m.shape();
        Self::from_coeffs(r, c, vec![m])
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(CMat::identity(n))
    }

    /// Row series `(f_1, …, f_n)` from scalar components.
    pub fn from_row(components: &[TaylorSeries<T>]) -> Self {
        let n = components.len();
        let d = components.iter().map(|c| c.degree()).max().unwrap_or(0);
        let coeffs = (0..=d)
            .map(|j| CMat::row_vector(&components.iter().map(|c| c.coeff(j)).collect::<Vec<_>>()))
            .collect();
        Self::from_coeffs(1, n, coeffs)
    }

    /// Builds a series entrywise from scalar series (row-major).
    pub fn from_entries(rows: usize, cols: usize, entries: &[TaylorSeries<T>]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let d = entries.iter().map(|c| c.degree()).max().unwrap_or(0);
        let coeffs = (0..=d)
            .map(|j| CMat::from_fn(rows, cols, |r, c| entries[r * cols + c].coeff(j)))
            .collect();
        Self::from_coeffs(rows, cols, coeffs)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[CMat<T>] {
        &self.coeffs
    }

    /// Coefficient `j`, zero beyond the stored degree.
    pub fn coeff(&self, j: usize) -> CMat<T> {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Scalar series in position `(r, c)`.
    pub fn entry(&self, r: usize, c: usize) -> TaylorSeries<T> {
        TaylorSeries::new(self.coeffs.iter().map(|m| m[(r, c)]).collect())
    }

    pub fn resized(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, CMat::zeros(self.rows, self.cols));
        MatrixTaylorSeries {
            rows: self.rows,
            cols: self.cols,
            coeffs: c,
        }
    }

    pub fn trimmed(&self, tol: T) -> Self {
        let last = self
            .coeffs
            .iter()
            .rposition(|c| c.max_abs() > tol)
            .unwrap_or(0);
        MatrixTaylorSeries {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs[..=last].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(HbError::Shape(format!(
                "add {:?} + {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let d = self.degree().max(other.degree());
        let coeffs = (0..=d).map(|j| &self.coeff(j) + &other.coeff(j)).collect();
        Ok(Self::from_coeffs(self.rows, self.cols, coeffs))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        MatrixTaylorSeries {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul_const(&self, m: &CMat<T>) -> Result<Self> {
        if m.cols() != self.rows {
            return Err(HbError::Shape(format!(
                "constant {:?} times series {:?}",
                m.shape(),
                self.shape()
            )));
        }
        Ok(Self::from_coeffs(
            m.rows(),
            self.cols,
            self.coeffs.iter().map(|c| m * c).collect(),
        ))
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul_const(&self, m: &CMat<T>) -> Result<Self> {
        if m.rows() != self.cols {
            return Err(HbError::Shape(format!(
                "series {:?} times constant {:?}",
                self.shape(),
                m.shape()
            )));
        }
        Ok(Self::from_coeffs(
            self.rows,
            m.cols(),
            self.coeffs.iter().map(|c| c * m).collect(),
        ))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_truncated(other, self.degree() + other.degree())
    }

    /// Matrix Cauchy product truncated at `degree`.
    pub fn multiply_truncated(&self, other: &Self, degree: usize) -> Result<Self> {
        if self.cols != other.rows {
            return Err(HbError::Shape(format!(
                "product of {:?} and {:?} series",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = vec![CMat::zeros(self.rows, other.cols); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(degree + 1) {
            if a.max_abs() == T::zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                out[i + j] += &(a * b);
            }
        }
        Ok(Self::from_coeffs(self.rows, other.cols, out))
    }

    /// Product with a scalar series, truncated at `degree`.
    pub fn scalar_multiply_truncated(&self, s: &TaylorSeries<T>, degree: usize) -> Self {
        let mut out = vec![CMat::zeros(self.rows, self.cols); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(degree + 1) {
            for (j, &b) in s.coeffs().iter().enumerate().take(degree + 1 - i) {
                out[i + j] += &a.scale(b);
            }
        }
        Self::from_coeffs(self.rows, self.cols, out)
    }

    pub fn evaluate(&self, lambda: Cx<T>) -> Result<CMat<T>> {
        check_interior(lambda)?;
        Ok(self.evaluate_unchecked(lambda))
    }

    pub fn evaluate_unchecked(&self, z: Cx<T>) -> CMat<T> {
        let mut acc = CMat::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(z) + c;
        }
        acc
    }

    /// Backward shift applied to every entry.
    pub fn backward_shift(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(self.rows, self.cols, 0);
        }
        Self::from_coeffs(self.rows, self.cols, self.coeffs[1..].to_vec())
    }

    /// Squared `H²` norm, `Σ_j ‖coeff_j‖_F²`.
    pub fn hardy_norm_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, c| {
            let f = c.frobenius_norm();
            s + f * f
        })
    }

    /// Coefficient-wise maximum entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let d = self.degree().max(other.degree());
        (0..=d).fold(T::zero(), |acc, j| {
            acc.max((&self.coeff(j) - &other.coeff(j)).max_abs())
        })
    }

    /// Interprets a 1×1 series as a scalar series.
    pub fn to_scalar_series(&self) -> Result<TaylorSeries<T>> {
        if self.shape() != (1, 1) {
            return Err(HbError::Shape(format!(
                "expected a 1x1 series, got {:?}",
                self.shape()
            )));
        }
        Ok(self.entry(0, 0))
    }

    pub fn cast<S: Real>(&self) -> MatrixTaylorSeries<S> {
        MatrixTaylorSeries {
            rows: self.rows,
            cols: self.cols,
            coeffs: self
                .coeffs
                .iter()
                .map(|m| {
                    CMat::from_vec(
                        m.rows(),
                        m.cols(),
                        m.as_slice()
                            .iter()
                            .map(|&z| crate::scalar::cast_cx(z))
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// Adjugate and determinant of a square matrix series, both truncated at
/// the series degree.
///
/// Cofactor expansion for `n ≤ 4`. Larger sizes use fraction-free
/// elimination for the determinant and `det · A⁻¹` for the adjugate, which
/// requires `det A(0) ≠ 0`.
pub fn adjugate_det<T: Real>(
    a: &MatrixTaylorSeries<T>,
) -> Result<(MatrixTaylorSeries<T>, TaylorSeries<T>)> {
    if a.rows() != a.cols() {
        return Err(HbError::Shape(format!(
            "adjugate of a {:?} series",
            a.shape()
        )));
    }
    let n = a.rows();
    let deg = a.degree();
    let entries: Vec<TaylorSeries<T>> = (0..n * n).map(|k| a.entry(k / n, k % n)).collect();
    if n <= 4 {
        let idx: Vec<usize> = (0..n).collect();
        let det = cofactor_det(&entries, n, &idx, &idx, deg);
        let adj_entries: Vec<TaylorSeries<T>> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if n == 1 {
                    return TaylorSeries::constant(cone());
                }
                // adj[i][j] = (-1)^{i+j} · minor with row j and column i removed
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let m = cofactor_det(&entries, n, &rows, &cols, deg);
                if (i + j) % 2 == 0 {
                    m
                } else {
                    m.scale(-cone::<T>())
                }
            })
            .collect();
        let adj = MatrixTaylorSeries::from_entries(n, n, &adj_entries).resized(deg);
        return Ok((adj, det.resized(deg)));
    }
    let det = bareiss_det(&entries, n, deg)?;
    let inv = matrix_series_inverse(a, deg)?;
    let adj = inv.scalar_multiply_truncated(&det, deg);
    Ok((adj, det))
}

fn cofactor_det<T: Real>(
    entries: &[TaylorSeries<T>],
    n: usize,
    rows: &[usize],
    cols: &[usize],
    deg: usize,
) -> TaylorSeries<T> {
    match rows.len() {
        0 => TaylorSeries::constant(cone()),
        1 => {
            entries[rows[0] * n + cols[0]].resized(deg.min(entries[rows[0] * n + cols[0]].degree()))
        }
        _ => {
            let mut acc = TaylorSeries::zero(0);
            let r0 = rows[0];
            let rest: Vec<usize> = rows[1..].to_vec();
            for (k, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = cofactor_det(entries, n, &rest, &sub_cols, deg);
                let term = entries[r0 * n + c].multiply_truncated(&minor, deg);
                acc = if k % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
    }
}

/// Fraction-free (Bareiss) elimination on power series. Exact divisions are
/// carried out by series division, which needs nonzero leading pivots at the
/// origin; rows are swapped to find them.
fn bareiss_det<T: Real>(
    entries: &[TaylorSeries<T>],
    n: usize,
    deg: usize,
) -> Result<TaylorSeries<T>> {
    let floor = lit::<T>(1e-300).max(T::min_positive_value());
    let mut m: Vec<TaylorSeries<T>> = entries.iter().map(|e| e.resized(deg)).collect();
    let mut sign = T::one();
    let mut prev = TaylorSeries::constant(cone());
    for k in 0..n - 1 {
        let p = (k..n)
            .max_by(|&x, &y| {
                m[x * n + k]
                    .coeff(0)
                    .norm()
                    .partial_cmp(&m[y * n + k].coeff(0).norm())
                    .unwrap()
            })
            .unwrap();
        if !(m[p * n + k].coeff(0).norm() > floor) {
            return Err(HbError::NotInvertibleAtOrigin(0.0));
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let prev_inv = prev.reciprocal(deg, floor)?;
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k * n + k]
                    .multiply_truncated(&m[i * n + j], deg)
                    .sub(&m[i * n + k].multiply_truncated(&m[k * n + j], deg));
                m[i * n + j] = t.multiply_truncated(&prev_inv, deg);
            }
        }
        prev = m[k * n + k].clone();
    }
    Ok(m[n * n - 1].scale(creal(sign)))
}

/// Inverse of a matrix series with invertible constant term, to `degree`.
pub fn matrix_series_inverse<T: Real>(
    a: &MatrixTaylorSeries<T>,
    degree: usize,
) -> Result<MatrixTaylorSeries<T>> {
    let n = a.rows();
    let a0_inv = a
        .coeff(0)
        .inverse()
        .ok_or_else(|| HbError::NotInvertibleAtOrigin(to_f64(a.coeff(0).det().norm())))?;
    let mut out: Vec<CMat<T>> = Vec::with_capacity(degree + 1);
    out.push(a0_inv.clone());
    for k in 1..=degree {
        let mut s = CMat::zeros(n, n);
        for j in 1..=k.min(a.degree()) {
            s += &(&a.coeffs()[j] * &out[k - j]);
        }
        out.push(-&(&a0_inv * &s));
    }
    Ok(MatrixTaylorSeries::from_coeffs(n, n, out))
}

/// Geometric decay fit of a nonnegative magnitude sequence.
///
/// Magnitudes at or below `noise` times the maximum are treated as exact
/// zeros. The ratio is the exponential of the least-squares slope of
/// `log x_j` over the last quarter of the significant range, together with
/// the prefactor `C` so that `x_j ≲ C ρ^j` on that range. A sequence with
/// fewer than four significant terms is reported as ratio zero.
pub fn geometric_tail_fit<T: Real>(mags: &[T], noise: T) -> (T, T) {
    let peak = mags.iter().fold(T::zero(), |a, &b| a.max(b));
    if !(peak > T::zero()) {
        return (T::zero(), T::zero());
    }
    let floor = peak * noise;
    let last = match mags.iter().rposition(|&x| x > floor) {
        Some(l) => l,
        None => return (T::zero(), T::zero()),
    };
    if last < 4 {
        return (T::zero(), peak);
    }
    let start = last - (last + 1) / 4;
    let pts: Vec<(T, T)> = (start..=last)
        .filter(|&j| mags[j] > floor)
        .map(|j| (from_usize::<T>(j), mags[j].ln()))
        .collect();
    if pts.len() < 2 {
        return (T::zero(), peak);
    }
    let k = from_usize::<T>(pts.len());
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / k;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / k;
    let sxx = pts
        .iter()
        .fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    let sxy = pts
        .iter()
        .fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    let slope = if sxx > T::zero() {
        sxy / sxx
    } else {
        T::zero()
    };
    let ratio = slope.exp();
    // Prefactor large enough to dominate every point of the fitted range.
    let c = pts
        .iter()
        .fold(T::zero(), |acc, p| acc.max((p.1 - slope * p.0).exp()));
    (ratio, c)
}

/// Checks a decay hint against the coefficients: the fitted ratio over the
/// last quarter must match `1/hint` within a factor of two.
pub fn decay_hint_consistent<T: Real>(s: &TaylorSeries<T>) -> bool {
    match s.decay_hint() {
        None => true,
        Some(hint) => {
            if !(hint > T::one()) {
                return true;
            }
            let mags: Vec<T> = s.coeffs().iter().map(|c| c.norm()).collect();
            let (ratio, _) = geometric_tail_fit(&mags, T::epsilon() * lit(10.0));
            if ratio == T::zero() {
                return true;
            }
            let expected = T::one() / hint;
            let q = ratio / expected;
            q <= lit(2.0) && q >= lit(0.5)
        }
    }
}

/// `|x| ≤ tol` for every coefficient; a small helper for tests and residuals.
pub fn max_coeff_abs<T: Real>(s: &TaylorSeries<T>) -> T {
    s.coeffs().iter().fold(T::zero(), |a, c| a.max(c.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn close(a: Cx<f64>, b: Cx<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn cauchy_products() {
        let a = TaylorSeries::<f64>::from_real(&[1.0, 1.0]);
        let b = TaylorSeries::<f64>::from_real(&[1.0, -1.0]);
        assert_eq!(
            a.multiply(&b).coeffs(),
            TaylorSeries::from_real(&[1.0, 0.0, -1.0]).coeffs()
        );
        let cube = a.multiply(&a).multiply(&a);
        assert_eq!(
            cube.coeffs(),
            TaylorSeries::from_real(&[1.0, 3.0, 3.0, 1.0]).coeffs()
        );
    }

    #[test]
    fn reciprocal_examples() {
        let one = TaylorSeries::<f64>::from_real(&[1.0]);
        assert_eq!(one.reciprocal(4, 1e-12).unwrap().coeffs()[0], cx(1.0, 0.0));
        let d = TaylorSeries::<f64>::from_real(&[1.0, -0.5]);
        let r = d.reciprocal(20, 1e-12).unwrap();
        for (j, c) in r.coeffs().iter().enumerate() {
            assert!(close(*c, cx(0.5f64.powi(j as i32), 0.0), 1e-15));
        }
        let two = TaylorSeries::<f64>::from_real(&[2.0]);
        assert!(close(
            two.reciprocal(0, 1e-12).unwrap().coeff(0),
            cx(0.5, 0.0),
            0.0
        ));
        let bad = TaylorSeries::<f64>::from_real(&[1e-13, 1.0]);
        assert!(matches!(
            bad.reciprocal(3, 1e-12),
            Err(HbError::NotInvertibleAtOrigin(_))
        ));
    }

    #[test]
    fn backward_shift_examples() {
        let c = TaylorSeries::<f64>::from_real(&[5.0]);
        assert_eq!(c.backward_shift().coeffs(), &[cx(0.0, 0.0)]);
        let f = TaylorSeries::<f64>::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(
            f.backward_shift().coeffs(),
            TaylorSeries::from_real(&[2.0, 3.0]).coeffs()
        );
        let mut g = TaylorSeries::<f64>::monomial(4);
        for _ in 0..4 {
            g = g.backward_shift();
        }
        assert_eq!(g.coeffs(), &[cx(1.0, 0.0)]);
    }

    #[test]
    fn evaluate_examples() {
        let f = TaylorSeries::<f64>::monomial(2);
        assert!(close(
            f.evaluate(cx(0.5, 0.0)).unwrap(),
            cx(0.25, 0.0),
            1e-16
        ));
        let c = TaylorSeries::<f64>::constant(cx(0.3, -2.0));
        assert_eq!(c.evaluate(cx(0.1, 0.7)).unwrap(), cx(0.3, -2.0));
        let g = TaylorSeries::<f64>::geometric(cx(1.0, 0.0), 60).without_decay_hint();
        assert!(close(
            g.evaluate(cx(0.3, 0.0)).unwrap(),
            cx(1.0 / 0.7, 0.0),
            1e-10
        ));
        assert!(matches!(
            f.evaluate(cx(1.0, 0.0)),
            Err(HbError::Domain { .. })
        ));
    }

    #[test]
    fn adjugate_small_cases() {
        let id = MatrixTaylorSeries::<f64>::identity(2);
        let (adj, det) = adjugate_det(&id).unwrap();
        assert_eq!(adj.coeff(0), CMat::identity(2));
        assert_eq!(det.coeff(0), cx(1.0, 0.0));

        let entries = vec![
            TaylorSeries::from_real(&[1.0, 1.0]),
            TaylorSeries::zero(0),
            TaylorSeries::zero(0),
            TaylorSeries::from_real(&[1.0]),
        ];
        let a = MatrixTaylorSeries::<f64>::from_entries(2, 2, &entries);
        let (adj, det) = adjugate_det(&a).unwrap();
        assert_eq!(det.coeffs(), &[cx(1.0, 0.0), cx(1.0, 0.0)]);
        assert_eq!(adj.entry(0, 0).coeffs(), &[cx(1.0, 0.0), cx(0.0, 0.0)]);
        assert_eq!(adj.entry(1, 1).coeffs(), &[cx(1.0, 0.0), cx(1.0, 0.0)]);
    }

    #[test]
    fn bareiss_matches_cofactors_for_five_by_five() {
        let n = 5;
        let mut s = 17u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let coeffs: Vec<CMat<f64>> = (0..4)
            .map(|j| {
                let m = CMat::from_fn(n, n, |_, _| cx(next(), next()));
                if j == 0 {
                    &m + &CMat::identity(n).scale(cx(3.0, 0.0))
                } else {
                    m
                }
            })
            .collect();
        let a = MatrixTaylorSeries::from_coeffs(n, n, coeffs);
        let (adj, det) = adjugate_det(&a).unwrap();
        let lhs = a.multiply_truncated(&adj, a.degree()).unwrap();
        let rhs = MatrixTaylorSeries::identity(n).scalar_multiply_truncated(&det, a.degree());
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        // constant term agrees with the dense determinant
        assert!(close(det.coeff(0), a.coeff(0).det(), 1e-10));
    }

    #[test]
    fn tail_fit_recovers_ratio() {
        let mags: Vec<f64> = (0..64).map(|j| 3.0 * 0.8f64.powi(j)).collect();
        let (r, c) = geometric_tail_fit(&mags, 1e-15);
        assert!((r - 0.8).abs() < 1e-12);
        assert!((c - 3.0).abs() < 1e-9);
        let poly = [1.0, 2.0, 0.0, 0.0];
        assert_eq!(geometric_tail_fit(&poly, 1e-15).0, 0.0);
    }
}
