//! Scalar outer function from boundary modulus via the cepstrum.

use crate::grid::{synthesize, BoundaryGrid};
use crate::linalg::CMat;
use crate::scalar::{creal, lit, Cx, Real};
use crate::series::{MatrixTaylorSeries, TaylorSeries};

/// `exp(u + iũ)` where `u = ½ log w` and `ũ` is its conjugate function,
/// both built from the grid Fourier coefficients of `u`. Values of `w`
/// below `clamp` are raised to `clamp` before taking the logarithm.
pub(crate) fn cepstral_outer<T: Real>(w: &[T], clamp: T, degree: usize) -> TaylorSeries<T> {
    let size = w.len();
    let half = lit::<T>(0.5);
    let log_modulus: Vec<Cx<T>> = w.iter().map(|&x| creal(half * x.max(clamp).ln())).collect();
    let grid = BoundaryGrid::from_scalar_samples(log_modulus).expect("power-of-two grid");
    let spectrum = grid.fourier_coefficients();
    // Analytic completion: û_0 + 2 Σ_{0<l<M/2} û_l z^l.
    let two = lit::<T>(2.0);
    let mut phase_coeffs = Vec::with_capacity(size / 2);
    phase_coeffs.push(CMat::scalar(creal(spectrum[0][(0, 0)].re)));
    for c in spectrum.iter().take(size / 2).skip(1) {
        phase_coeffs.push(CMat::scalar(c[(0, 0)] * two));
    }
    let log_outer = MatrixTaylorSeries::from_coeffs(1, 1, phase_coeffs);
    let trace = synthesize(&log_outer, size);
    let values: Vec<Cx<T>> = trace.scalar_samples().iter().map(|z| z.exp()).collect();
    let outer = BoundaryGrid::from_scalar_samples(values).expect("power-of-two grid");
    let coeffs = outer.fourier_coefficients();
    let top = degree.min(size / 2 - 1);
    TaylorSeries::new(coeffs.iter().take(top + 1).map(|c| c[(0, 0)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::node;
    use crate::scalar::cx;

    #[test]
    fn recovers_simple_outer_factor() {
        let m = 256;
        let w: Vec<f64> = (0..m)
            .map(|k| (cx::<f64>(1.0, 0.0) + node::<f64>(k, m) * 0.5).norm_sqr())
            .collect();
        let a = cepstral_outer(&w, 1e-9, 20);
        assert!((a.coeff(0) - cx(1.0, 0.0)).norm() < 1e-12);
        assert!((a.coeff(1) - cx(0.5, 0.0)).norm() < 1e-12);
        assert!(a.coeffs()[2..].iter().all(|c| c.norm() < 1e-12));
        let one = cepstral_outer(&vec![1.0; 64], 1e-9, 4);
        assert!((one.coeff(0) - cx(1.0, 0.0)).norm() < 1e-15);
    }
}
