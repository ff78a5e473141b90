//! Equispaced boundary samples on the unit circle and the FFT bridges to
//! and from Taylor coefficients.

use crate::error::{HbError, Result};
use crate::linalg::CMat;
use crate::scalar::{czero, from_usize, lit, to_f64, unit, Cx, Real};
use crate::series::{MatrixTaylorSeries, TaylorSeries};
use rustfft::FftPlanner;

/// Samples of a scalar or matrix function at `ζ_k = exp(2πik/M)`.
///
/// Stored as one length-`M` channel per matrix entry (row-major), which is
/// the layout the transforms want.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid<T> {
    rows: usize,
    cols: usize,
    channels: Vec<Vec<Cx<T>>>,
}

impl<T: Real> BoundaryGrid<T> {
    pub fn from_channels(rows: usize, cols: usize, channels: Vec<Vec<Cx<T>>>) -> Result<Self> {
        if channels.len() != rows * cols {
            return Err(HbError::Shape(format!(
                "{} channels for a {rows}x{cols} grid",
                channels.len()
            )));
        }
        let m = channels.first().map_or(0, |c| c.len());
        if !m.is_power_of_two() || channels.iter().any(|c| c.len() != m) {
            return Err(HbError::Shape(format!(
                "grid size {m} is not a power of two"
            )));
        }
        Ok(BoundaryGrid {
            rows,
            cols,
            channels,
        })
    }

    pub fn from_scalar_samples(samples: Vec<Cx<T>>) -> Result<Self> {
        Self::from_channels(1, 1, vec![samples])
    }

    pub fn from_real_samples(samples: &[T]) -> Result<Self> {
        Self::from_scalar_samples(samples.iter().map(|&x| Cx::new(x, T::zero())).collect())
    }

    /// Samples `f(ζ_k)` of a closure.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        size: usize,
        mut f: impl FnMut(Cx<T>) -> CMat<T>,
    ) -> Result<Self> {
        let mut channels = vec![vec![czero(); size]; rows * cols];
        for k in 0..size {
            let m = f(node::<T>(k, size));
            if m.shape() != (rows, cols) {
                return Err(HbError::Shape(format!(
                    "sample of shape {:?} in a {rows}x{cols} grid",
                    m.shape()
                )));
            }
            for (c, v) in channels.iter_mut().zip(m.as_slice()) {
                c[k] = *v;
            }
        }
        Self::from_channels(rows, cols, channels)
    }

    pub fn from_matrices(rows: usize, cols: usize, samples: &[CMat<T>]) -> Result<Self> {
        Self::from_fn(rows, cols, samples.len(), {
            let mut k = 0;
            move |_| {
                let m = samples[k].clone();
                k += 1;
                m
            }
        })
    }

    #[inline]
    pub fn grid_size(&self) -> usize {
        self.channels[0].len()
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn channel(&self, r: usize, c: usize) -> &[Cx<T>] {
        &self.channels[r * self.cols + c]
    }

    /// Scalar samples of a 1×1 grid.
    pub fn scalar_samples(&self) -> &[Cx<T>] {
        &self.channels[0]
    }

    pub fn sample(&self, k: usize) -> CMat<T> {
        CMat::from_vec(
            self.rows,
            self.cols,
            self.channels.iter().map(|c| c[k]).collect(),
        )
    }

    pub fn samples(&self) -> Vec<CMat<T>> {
        (0..self.grid_size()).map(|k| self.sample(k)).collect()
    }

    /// Node `ζ_k` of this grid.
    pub fn node(&self, k: usize) -> Cx<T> {
        node(k, self.grid_size())
    }

    /// Pointwise map to a new grid.
    pub fn map(
        &self,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, &CMat<T>) -> CMat<T>,
    ) -> Result<Self> {
        let samples: Vec<CMat<T>> = (0..self.grid_size())
            .map(|k| f(k, &self.sample(k)))
            .collect();
        Self::from_matrices(rows, cols, &samples)
    }

    /// All `M` discrete Fourier coefficients, index `j` holding frequency `j`
    /// for `j < M/2` and `j − M` above.
    pub fn fourier_coefficients(&self) -> Vec<CMat<T>> {
        let m = self.grid_size();
        let mut planner = FftPlanner::<T>::new();
        let fft = planner.plan_fft_forward(m);
        let scale = T::one() / from_usize::<T>(m);
        let spectra: Vec<Vec<Cx<T>>> = self
            .channels
            .iter()
            .map(|c| {
                let mut buf = c.clone();
                fft.process(&mut buf);
                buf.iter().map(|&z| z * scale).collect()
            })
            .collect();
        (0..m)
            .map(|j| CMat::from_vec(self.rows, self.cols, spectra.iter().map(|s| s[j]).collect()))
            .collect()
    }
}

/// `exp(2πik/M)`.
pub fn node<T: Real>(k: usize, size: usize) -> Cx<T> {
    unit(T::TAU() * from_usize::<T>(k) / from_usize::<T>(size))
}

/// Smallest admissible grid for a series of the given degree.
pub fn required_grid(degree: usize) -> usize {
    (2 * degree + 2).next_power_of_two()
}

fn check_grid(degree: usize, size: usize) -> Result<()> {
    let required = 2 * degree + 2;
    if size < required || !size.is_power_of_two() {
        return Err(HbError::GridTooSmall {
            grid: size,
            degree,
            required,
        });
    }
    Ok(())
}

/// Samples a matrix series on the `M`-point grid by FFT synthesis.
pub fn boundary_from_matrix_taylor<T: Real>(
    s: &MatrixTaylorSeries<T>,
    size: usize,
) -> Result<BoundaryGrid<T>> {
    check_grid(s.degree(), size)?;
    Ok(synthesize(s, size))
}

/// Samples a scalar series on the `M`-point grid by FFT synthesis.
pub fn boundary_from_taylor<T: Real>(s: &TaylorSeries<T>, size: usize) -> Result<BoundaryGrid<T>> {
    boundary_from_matrix_taylor(&s.to_matrix_series(), size)
}

/// Synthesis without the sizing check. Coefficients past `M` alias, which
/// callers that only need boundary values of a long truncation accept.
pub(crate) fn synthesize<T: Real>(s: &MatrixTaylorSeries<T>, size: usize) -> BoundaryGrid<T> {
    let (rows, cols) = s.shape();
    let mut planner = FftPlanner::<T>::new();
    let ifft = planner.plan_fft_inverse(size);
    let mut channels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut buf = vec![czero(); size];
            for (j, m) in s.coeffs().iter().enumerate() {
                buf[j % size] = buf[j % size] + m[(r, c)];
            }
            ifft.process(&mut buf);
            channels.push(buf);
        }
    }
    BoundaryGrid {
        rows,
        cols,
        channels,
    }
}

/// Samples `s(r ζ_k)` on a circle of radius `r` inside the disk.
pub(crate) fn synthesize_on_radius<T: Real>(
    s: &MatrixTaylorSeries<T>,
    radius: T,
    size: usize,
) -> BoundaryGrid<T> {
    let mut p = T::one();
    let scaled: Vec<CMat<T>> = s
        .coeffs()
        .iter()
        .map(|m| {
            let out = m.scale_real(p);
            p = p * radius;
            out
        })
        .collect();
    synthesize(
        &MatrixTaylorSeries::from_coeffs(s.rows(), s.cols(), scaled),
        size,
    )
}

/// Default relative ℓ² tolerance for negative-frequency mass.
pub fn analytic_tolerance<T: Real>() -> T {
    lit::<T>(1e-9).max(T::epsilon() * lit(1e3))
}

/// First `degree + 1` nonnegative Fourier coefficients of a matrix grid.
pub fn matrix_taylor_from_boundary<T: Real>(
    g: &BoundaryGrid<T>,
    degree: usize,
) -> Result<MatrixTaylorSeries<T>> {
    matrix_taylor_from_boundary_with_tol(g, degree, analytic_tolerance())
}

pub fn matrix_taylor_from_boundary_with_tol<T: Real>(
    g: &BoundaryGrid<T>,
    degree: usize,
    tol: T,
) -> Result<MatrixTaylorSeries<T>> {
    let m = g.grid_size();
    if degree >= m {
        return Err(HbError::GridTooSmall {
            grid: m,
            degree,
            required: 2 * degree + 2,
        });
    }
    let coeffs = g.fourier_coefficients();
    let mass = |c: &CMat<T>| {
        let f = c.frobenius_norm();
        f * f
    };
    let total = coeffs.iter().fold(T::zero(), |s, c| s + mass(c));
    let negative = coeffs[m / 2 + 1..]
        .iter()
        .fold(T::zero(), |s, c| s + mass(c));
    if total > T::zero() && negative.sqrt() > tol * total.sqrt() {
        return Err(HbError::NotAnalytic {
            mass: to_f64((negative / total).sqrt()),
        });
    }
    let (rows, cols) = g.shape();
    Ok(MatrixTaylorSeries::from_coeffs(
        rows,
        cols,
        coeffs[..=degree].to_vec(),
    ))
}

/// First `degree + 1` nonnegative Fourier coefficients of a scalar grid.
pub fn taylor_from_boundary<T: Real>(
    g: &BoundaryGrid<T>,
    degree: usize,
) -> Result<TaylorSeries<T>> {
    matrix_taylor_from_boundary(g, degree)?.to_scalar_series()
}

/// Analytic projection used by the factorization iterations: keeps
/// frequencies `1..=degree`, halves the constant term, and discards the
/// negative half and the Nyquist bin.
pub(crate) fn causal_part<T: Real>(g: &BoundaryGrid<T>, degree: usize) -> MatrixTaylorSeries<T> {
    let m = g.grid_size();
    let coeffs = g.fourier_coefficients();
    let half = lit::<T>(0.5);
    let top = degree.min(m / 2 - 1);
    let mut out: Vec<CMat<T>> = coeffs[..=top].to_vec();
    out[0] = out[0].scale_real(half);
    let (rows, cols) = g.shape();
    MatrixTaylorSeries::from_coeffs(rows, cols, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn constant_and_identity() {
        let g = boundary_from_taylor(&TaylorSeries::<f64>::from_real(&[1.0]), 8).unwrap();
        assert!(g
            .scalar_samples()
            .iter()
            .all(|s| (s - cx(1.0, 0.0)).norm() < 1e-15));
        let z = boundary_from_taylor(&TaylorSeries::<f64>::from_real(&[0.0, 1.0]), 8).unwrap();
        for k in 0..8 {
            assert!((z.scalar_samples()[k] - node::<f64>(k, 8)).norm() < 1e-15);
        }
        let back = taylor_from_boundary(&z, 3).unwrap();
        assert!((back.coeff(1) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!(back.coeff(0).norm() < 1e-15 && back.coeff(2).norm() < 1e-15);
    }

    #[test]
    fn geometric_series_closed_form() {
        let s = TaylorSeries::<f64>::geometric(cx(0.5, 0.0), 31);
        let g = boundary_from_taylor(&s, 64).unwrap();
        for k in 0..64 {
            let want = cx::<f64>(1.0, 0.0) / (cx::<f64>(1.0, 0.0) - node::<f64>(k, 64) * 0.5);
            assert!((g.scalar_samples()[k] - want).norm() < 1e-9);
        }
        let exact = BoundaryGrid::from_fn(1, 1, 64, |z| {
            CMat::scalar(cx::<f64>(1.0, 0.0) / (cx::<f64>(1.0, 0.0) - z * 0.5))
        })
        .unwrap();
        let c = taylor_from_boundary(&exact, 20).unwrap();
        for j in 0..=20 {
            assert!((c.coeff(j) - cx(0.5f64.powi(j as i32), 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn sizing_and_analyticity_errors() {
        let s = TaylorSeries::<f64>::zero(10);
        assert!(matches!(
            boundary_from_taylor(&s, 16),
            Err(HbError::GridTooSmall { .. })
        ));
        let conj = BoundaryGrid::from_fn(1, 1, 16, |z: Cx<f64>| CMat::scalar(z.conj())).unwrap();
        assert!(matches!(
            taylor_from_boundary(&conj, 3),
            Err(HbError::NotAnalytic { .. })
        ));
    }
}
