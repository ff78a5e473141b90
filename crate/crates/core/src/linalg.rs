//! Small dense complex linear algebra.
//!
//! Everything here works on row-major `CMat<T>` values and is generic over
//! the crate scalar. Sizes are small (n×n symbols, Gram matrices, Toeplitz
//! sections of a few hundred rows), so the algorithms are the textbook ones:
//! partial-pivoting LU, Cholesky, and Householder tridiagonalisation followed
//! by implicit QL for Hermitian eigenproblems.

use crate::scalar::{abs, cone, creal, czero, lit, Cx, Real};
use num_complex::Complex;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "CMat::from_vec length mismatch");
        CMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Cx<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn row_vector(v: &[Cx<T>]) -> Self {
        CMat {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn column_vector(v: &[Cx<T>]) -> Self {
        CMat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn scalar(z: Cx<T>) -> Self {
        CMat {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn diagonal(d: &[Cx<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(creal(s))
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(czero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
    pub fn hermitian_norm(&self) -> T {
        let (vals, _) = self.hermitian_eigen_values_only();
        vals.iter().fold(T::zero(), |acc, &v| acc.max(abs(v)))
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> T {
        let g = if self.rows >= self.cols {
            self.adjoint() * self
        } else {
            self * &self.adjoint()
        };
        let (vals, _) = g.hermitian_eigen_values_only();
        vals.iter()
            .fold(T::zero(), |acc, &v| acc.max(v))
            .max(T::zero())
            .sqrt()
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(lit(0.5))
    }

    /// Largest entry of `self - self*`, a cheap Hermitian-ness check.
    pub fn skew_defect(&self) -> T {
        (self - &self.adjoint()).max_abs()
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::new(self)
    }

    pub fn det(&self) -> Cx<T> {
        assert!(self.is_square(), "determinant of non-square matrix");
        match self.rows {
            0 => cone(),
            1 => self.data[0],
            2 => self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            _ => self.lu().map_or(czero(), |lu| lu.det()),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu().map(|lu| lu.inverse())
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        self.lu().map(|lu| lu.solve(rhs))
    }

    /// Classical adjugate by cofactors. Intended for the small symbol sizes.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square(), "adjugate of non-square matrix");
        let n = self.rows;
        match n {
            0 => Self::zeros(0, 0),
            1 => Self::identity(1),
            2 => CMat::from_vec(
                2,
                2,
                vec![self[(1, 1)], -self[(0, 1)], -self[(1, 0)], self[(0, 0)]],
            ),
            _ => Self::from_fn(n, n, |i, j| {
                // adj[i][j] = (-1)^{i+j} M_{ji}
                let minor = self.minor(j, i);
                let sign = if (i + j) % 2 == 0 {
                    T::one()
                } else {
                    -T::one()
                };
                minor.det() * sign
            }),
        }
    }

    /// Matrix with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self[(i, j)]);
            }
        }
        CMat {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Lower-triangular `L` with `self = L L*`; `None` unless Hermitian positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = creal(djj);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// the unitary matrix whose columns are the matching eigenvectors.
    pub fn hermitian_eigen(&self) -> (Vec<T>, Self) {
        hermitian_eigen(self, true)
    }

    fn hermitian_eigen_values_only(&self) -> (Vec<T>, Self) {
        hermitian_eigen(self, false)
    }

    /// Polar decomposition `self = U P` of an invertible square matrix with
    /// `U` unitary and `P` Hermitian positive definite.
    pub fn polar(&self) -> Option<(Self, Self)> {
        let g = self.adjoint() * self;
        let (vals, vecs) = g.hermitian_eigen();
        if vals.iter().any(|&v| !(v > T::zero())) {
            return None;
        }
        let sq: Vec<Cx<T>> = vals.iter().map(|&v| creal(v.sqrt())).collect();
        let isq: Vec<Cx<T>> = vals.iter().map(|&v| creal(T::one() / v.sqrt())).collect();
        let p = &(&vecs * &Self::diagonal(&sq)) * &vecs.adjoint();
        let pinv = &(&vecs * &Self::diagonal(&isq)) * &vecs.adjoint();
        let u = self * &pinv;
        Some((u, p.hermitian_part()))
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix add shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sub shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Real> AddAssign<&CMat<T>> for CMat<T> {
    fn add_assign(&mut self, rhs: &CMat<T>) {
        assert_eq!(self.shape(), rhs.shape(), "matrix add shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b;
        }
    }
}

impl<T: Real> SubAssign<&CMat<T>> for CMat<T> {
    fn sub_assign(&mut self, rhs: &CMat<T>) {
        assert_eq!(self.shape(), rhs.shape(), "matrix sub shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;
    fn neg(self) -> CMat<T> {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| -z).collect(),
        }
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }
}

impl<T: Real> Mul<&CMat<T>> for CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        &self * rhs
    }
}

impl<T: Real> Add<&CMat<T>> for CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        &self + rhs
    }
}

impl<T: Real> Sub<&CMat<T>> for CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        &self - rhs
    }
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<Cx<T>>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    fn new(a: &CMat<T>) -> Option<Self> {
        assert!(a.is_square(), "LU of non-square matrix");
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = a.max_abs();
        if !(scale > T::zero()) && n > 0 {
            return None;
        }
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold(
                        (k, -T::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pmax > scale * T::epsilon() * lit(1e-3)) {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] = lu[i * n + j] - f * t;
                }
            }
        }
        Some(Lu { n, lu, perm, sign })
    }

    pub fn det(&self) -> Cx<T> {
        (0..self.n).fold(creal(self.sign), |acc, i| acc * self.lu[i * self.n + i])
    }

    pub fn solve(&self, rhs: &CMat<T>) -> CMat<T> {
        let n = self.n;
        assert_eq!(rhs.rows, n, "LU solve shape mismatch");
        let mut x = CMat::zeros(n, rhs.cols);
        for c in 0..rhs.cols {
            let mut y: Vec<Cx<T>> = (0..n).map(|i| rhs[(self.perm[i], c)]).collect();
            for i in 0..n {
                for k in 0..i {
                    let t = y[k];
                    y[i] = y[i] - self.lu[i * n + k] * t;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let t = y[k];
                    y[i] = y[i] - self.lu[i * n + k] * t;
                }
                y[i] = y[i] / self.lu[i * n + i];
            }
            for i in 0..n {
                x[(i, c)] = y[i];
            }
        }
        x
    }

    pub fn inverse(&self) -> CMat<T> {
        self.solve(&CMat::identity(self.n))
    }
}

fn hermitian_eigen<T: Real>(a: &CMat<T>, want_vectors: bool) -> (Vec<T>, CMat<T>) {
    assert!(a.is_square(), "eigenproblem of non-square matrix");
    let n = a.rows;
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let mut m = a.hermitian_part();
    let mut q = CMat::identity(n);

    // Householder reduction to tridiagonal form.
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Cx<T>> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let xnorm = x.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if !(xnorm > T::zero()) {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            cone()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if !(vnorm > T::zero()) {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        let two = lit::<T>(2.0);
        // m <- H m with H = I - 2 v v* on rows k+1..n
        for j in 0..n {
            let mut s = czero();
            for (t, vi) in v.iter().enumerate() {
                s = s + vi.conj() * m[(k + 1 + t, j)];
            }
            let s = s * two;
            for (t, vi) in v.iter().enumerate() {
                m[(k + 1 + t, j)] = m[(k + 1 + t, j)] - *vi * s;
            }
        }
        // m <- m H, and q <- q H when vectors are wanted
        reflect_columns(&mut m, &v, k + 1);
        if want_vectors {
            reflect_columns(&mut q, &v, k + 1);
        }
    }

    // Rotate phases so that the sub-diagonal is real and nonnegative.
    let mut d: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut p = cone::<T>();
    let mut phases = vec![cone::<T>(); n];
    for i in 0..n - 1 {
        let o = m[(i + 1, i)];
        let r = o.norm();
        e[i + 1] = r;
        if r > T::zero() {
            p = p * (o / r);
        }
        phases[i + 1] = p;
    }
    if want_vectors {
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] = q[(i, j)] * phases[j];
            }
        }
    }

    tql2(&mut d, &mut e, want_vectors.then_some(&mut q));
    (d, q)
}

fn reflect_columns<T: Real>(target: &mut CMat<T>, v: &[Cx<T>], offset: usize) {
    let two = lit::<T>(2.0);
    for i in 0..target.rows {
        let mut s = czero();
        for (t, vi) in v.iter().enumerate() {
            s = s + target[(i, offset + t)] * *vi;
        }
        let s = s * two;
        for (t, vi) in v.iter().enumerate() {
            target[(i, offset + t)] = target[(i, offset + t)] - s * vi.conj();
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (`d` diagonal,
/// `e[i]` the element between rows `i-1` and `i`), rotating the columns of
/// `v` alongside. Eigenvalues are returned sorted ascending.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], mut v: Option<&mut CMat<T>>) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(abs(d[l]) + abs(e[l]));
        let mut m = l;
        while m < n {
            if abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    break;
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (lit::<T>(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[(k, i + 1)];
                            let vk = v[(k, i)];
                            v[(k, i + 1)] = vk * s + hk * c;
                            v[(k, i)] = vk * c - hk * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if let Some(v) = v.as_deref_mut() {
                for r in 0..n {
                    let t = v[(r, i)];
                    v[(r, i)] = v[(r, k)];
                    v[(r, k)] = t;
                }
            }
        }
    }
}

/// Solves the real symmetric positive (semi)definite system `a x = b` with a
/// small Tikhonov shift, used by the Gauss–Newton polish.
pub(crate) fn solve_normal_equations<T: Real>(
    a: &[T],
    b: &[T],
    n: usize,
    shift: T,
) -> Option<Vec<T>> {
    let m = CMat::from_fn(n, n, |i, j| {
        let mut v = a[i * n + j];
        if i == j {
            v = v + shift;
        }
        creal(v)
    });
    let l = m.cholesky()?;
    // forward / back substitution with real data carried in complex storage
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[(i, k)].re * y[k];
        }
        y[i] = s / l[(i, i)].re;
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[(k, i)].re * x[k];
        }
        x[i] = s / l[(i, i)].re;
    }
    Some(x)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    fn hermitian(n: usize, seed: u64) -> CMat<f64> {
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = CMat::from_fn(n, n, |_, _| c(next(), next()));
        m.hermitian_part()
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = CMat::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, 0.0), c(0.0, -1.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0), c(0.2, 0.2)],
            vec![c(0.0, 0.3), c(-1.0, 0.0), c(4.0, 0.0)],
        ]);
        let inv = a.inverse().unwrap();
        let id = &a * &inv;
        assert!((&id - &CMat::identity(3)).max_abs() < 1e-14);
        let adj = a.adjugate();
        let should = inv.scale(a.det());
        assert!((&adj - &should).max_abs() < 1e-13);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let a = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ]);
        assert!(a.lu().is_none());
        assert_eq!(a.det(), c(0.0, 0.0));
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        for n in [1, 2, 3, 7, 20] {
            let h = hermitian(n, n as u64 + 3);
            let (vals, vecs) = h.hermitian_eigen();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let lam = CMat::diagonal(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
            let back = &(&vecs * &lam) * &vecs.adjoint();
            assert!((&back - &h).max_abs() < 1e-12, "n={n}");
            let orth = &vecs.adjoint() * &vecs;
            assert!((&orth - &CMat::identity(n)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_and_polar() {
        let h = hermitian(4, 9);
        let spd = &(&h * &h) + &CMat::identity(4);
        let l = spd.cholesky().unwrap();
        assert!((&(&l * &l.adjoint()) - &spd).max_abs() < 1e-13);
        let a = &h + &CMat::identity(4).scale(c(0.3, 0.7));
        let (u, p) = a.polar().unwrap();
        assert!((&(&u * &p) - &a).max_abs() < 1e-12);
        assert!((&(&u.adjoint() * &u) - &CMat::identity(4)).max_abs() < 1e-12);
        let (vals, _) = p.hermitian_eigen();
        assert!(vals[0] > 0.0);
    }

    #[test]
    fn operator_norm_of_row() {
        let r = CMat::row_vector(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((r.operator_norm() - 5.0).abs() < 1e-14);
    }
}
