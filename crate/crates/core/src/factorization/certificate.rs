//! Numerical outerness certificate.

use crate::error::{HbError, Result};
use crate::grid::synthesize_on_radius;
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::series::MatrixTaylorSeries;
use serde::Serialize;

/// Mean-value test for `log|det A|`.
///
/// An outer determinant has `log|det A|` harmonic in the disk, so its mean
/// over any circle `|z| = r` equals `log|det A(0)|`. A zero of `det A`
/// inside that circle raises the mean by `log(r/|α|)` (Jensen). The circle
/// sits just inside the unit circle so that boundary zeros, which an outer
/// function may have, do not spoil the quadrature.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OuterCertificate {
    /// `|log|det A(0)| − mean log|det A(rζ)||`; infinite when `det A(0) = 0`.
    pub gap: f64,
    pub radius: f64,
    pub points: usize,
    /// Fraction of quadrature points where `det A` vanished and was skipped.
    pub trimmed_fraction: f64,
}

impl OuterCertificate {
    pub fn certifies(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

/// Computes the certificate with `8M` quadrature points on the circle of
/// radius `r = (1e-14)^{1/(8M)}`, where `M` is the configured grid size.
pub fn outerness_certificate<T: Real>(
    mate: &MatrixTaylorSeries<T>,
    grid: usize,
) -> Result<OuterCertificate> {
    if mate.rows() != mate.cols() {
        return Err(HbError::Shape(format!(
            "outerness of a {:?} series",
            mate.shape()
        )));
    }
    let points = (8 * grid).max(8 * (mate.degree() + 1)).next_power_of_two();
    let radius = lit::<T>(1e-14).ln() / from_usize(points);
    let radius = radius.exp();
    let det0 = mate.coeff(0).det().norm();
    if !(det0 > T::zero()) {
        return Ok(OuterCertificate {
            gap: f64::INFINITY,
            radius: to_f64(radius),
            points,
            trimmed_fraction: 0.0,
        });
    }
    let trace = synthesize_on_radius(mate, radius, points);
    let floor = T::min_positive_value();
    let mut sum = T::zero();
    let mut used = 0usize;
    for k in 0..points {
        let d = trace.sample(k).det().norm();
        if d > floor {
            sum = sum + d.ln();
            used += 1;
        }
    }
    let trimmed_fraction = (points - used) as f64 / points as f64;
    if used == 0 {
        return Ok(OuterCertificate {
            gap: f64::INFINITY,
            radius: to_f64(radius),
            points,
            trimmed_fraction,
        });
    }
    let mean = sum / from_usize(used);
    Ok(OuterCertificate {
        gap: to_f64(crate::scalar::abs(det0.ln() - mean)),
        radius: to_f64(radius),
        points,
        trimmed_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::scalar::cx;

    #[test]
    fn identity_and_inner_factor() {
        let id = MatrixTaylorSeries::<f64>::identity(2);
        assert!(outerness_certificate(&id, 64).unwrap().gap < 1e-15);
        let diag = MatrixTaylorSeries::<f64>::from_coeffs(
            2,
            2,
            vec![
                CMat::diagonal(&[cx(0.0, 0.0), cx(1.0, 0.0)]),
                CMat::diagonal(&[cx(1.0, 0.0), cx(0.0, 0.0)]),
            ],
        );
        let cert = outerness_certificate(&diag, 64).unwrap();
        assert!(cert.gap.is_infinite() && !cert.certifies(1e-8));
        // (z - 0.5) has a zero inside: Jensen gives gap log(r / 0.5).
        let blaschke = MatrixTaylorSeries::<f64>::from_coeffs(
            1,
            1,
            vec![CMat::scalar(cx(-0.5, 0.0)), CMat::scalar(cx(1.0, 0.0))],
        );
        let cert = outerness_certificate(&blaschke, 64).unwrap();
        assert!((cert.gap - (cert.radius / 0.5).ln()).abs() < 1e-10);
        // 1 + z is outer with a boundary zero.
        let edge = MatrixTaylorSeries::<f64>::from_coeffs(
            1,
            1,
            vec![CMat::scalar(cx(1.0, 0.0)), CMat::scalar(cx(1.0, 0.0))],
        );
        assert!(outerness_certificate(&edge, 1024).unwrap().gap < 1e-12);
    }
}
