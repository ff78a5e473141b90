//! Gauss–Newton refinement for spectral densities that are Laurent
//! polynomials.
//!
//! When `W = Σ_{|l|≤d} W_l ζ^l`, its outer factor is a polynomial of degree
//! `d`, and the coefficient equations `Σ_k A_k* A_{k+l} = W_l` can be solved
//! directly. Boundary zeros of `det W` make these equations singular to
//! first order; adding `det A(ζ₀) = 0` at each detected zero restores a
//! well-conditioned system.

use crate::linalg::{solve_normal_equations, CMat};
use crate::scalar::{cone, from_usize, lit, unit, Cx, Real};

/// Laurent coefficients `W_0, …, W_d` of a Hermitian density (`W_{-l} = W_l*`).
#[derive(Clone, Debug)]
pub(crate) struct Laurent<T> {
    pub coeffs: Vec<CMat<T>>,
}

impl<T: Real> Laurent<T> {
    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn size(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// `W(e^{iθ})` and its derivative in `θ`.
    fn eval(&self, theta: T) -> (CMat<T>, CMat<T>) {
        let n = self.size();
        let mut w = self.coeffs[0].clone();
        let mut dw = CMat::zeros(n, n);
        for (l, c) in self.coeffs.iter().enumerate().skip(1) {
            let z = unit(theta * from_usize(l));
            let up = c.scale(z);
            let down = c.adjoint().scale(z.conj());
            w = &(&w + &up) + &down;
            let il = Cx::new(T::zero(), from_usize(l));
            dw = &(&dw + &up.scale(il)) - &down.scale(il);
        }
        (w, dw)
    }

    fn det_and_slope(&self, theta: T) -> (T, T) {
        let (w, dw) = self.eval(theta);
        let g = w.det().re;
        let slope = (&w.adjugate() * &dw).trace().re;
        (g, slope)
    }
}

/// Reads off a Laurent polynomial from the full set of grid Fourier
/// coefficients, or `None` when the bandwidth exceeds `max_bandwidth` or the
/// grid is too coarse to resolve it.
pub(crate) fn detect_laurent<T: Real>(
    fourier: &[CMat<T>],
    max_bandwidth: usize,
) -> Option<Laurent<T>> {
    let m = fourier.len();
    let scale = fourier.iter().fold(T::zero(), |a, c| a.max(c.max_abs()));
    if !(scale > T::zero()) {
        return None;
    }
    let threshold = scale * lit::<T>(1e-13).max(T::epsilon() * lit(100.0));
    let mut bandwidth = 0;
    for l in 1..m / 2 {
        if fourier[l].max_abs() > threshold || fourier[m - l].max_abs() > threshold {
            bandwidth = l;
        }
    }
    if bandwidth > max_bandwidth || 4 * bandwidth + 2 > m {
        return None;
    }
    let mut coeffs: Vec<CMat<T>> = fourier[..=bandwidth].to_vec();
    coeffs[0] = coeffs[0].hermitian_part();
    Some(Laurent { coeffs })
}

/// Boundary points where `det W` vanishes to within `rel_tol` of its
/// maximum. Candidates are grid minima, refined as roots of the derivative
/// of `det W(e^{iθ})` by bisection.
pub(crate) fn boundary_zeros<T: Real>(w: &Laurent<T>, rel_tol: T) -> Vec<Cx<T>> {
    let samples = (64 * w.bandwidth()).max(1024).next_power_of_two();
    let step = T::TAU() / from_usize(samples);
    let values: Vec<T> = (0..samples)
        .map(|k| w.det_and_slope(step * from_usize(k)).0)
        .collect();
    let peak = values.iter().fold(T::zero(), |a, &b| a.max(b));
    if !(peak > T::zero()) {
        return Vec::new();
    }
    let mut thetas: Vec<T> = Vec::new();
    for k in 0..samples {
        let prev = values[(k + samples - 1) % samples];
        let next = values[(k + 1) % samples];
        let here = values[k];
        if !(here <= prev && here <= next && here < peak * lit(1e-3)) {
            continue;
        }
        let mut lo = step * (from_usize::<T>(k) - T::one());
        let mut hi = step * (from_usize::<T>(k) + T::one());
        let (_, s_lo) = w.det_and_slope(lo);
        let (_, s_hi) = w.det_and_slope(hi);
        if s_lo > T::zero() || s_hi < T::zero() {
            continue;
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if w.det_and_slope(mid).1 < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = (lo + hi) * lit(0.5);
        let (g, _) = w.det_and_slope(theta);
        if g <= peak * rel_tol
            && thetas
                .iter()
                .all(|&t| angular_gap(t, theta) > step * lit(2.0))
        {
            thetas.push(theta);
        }
    }
    thetas.into_iter().map(unit).collect()
}

fn angular_gap<T: Real>(a: T, b: T) -> T {
    let d = crate::scalar::abs(a - b) % T::TAU();
    d.min(T::TAU() - d)
}

struct Layout {
    n: usize,
    degree: usize,
    pins: usize,
}

impl Layout {
    fn unknowns(&self) -> usize {
        2 * self.n * self.n * (self.degree + 1)
    }

    fn equations(&self) -> usize {
        2 * self.n * self.n * (self.degree + 1) + 2 * self.n * self.n + 2 * self.pins
    }

    fn var(&self, k: usize, r: usize, c: usize) -> usize {
        2 * ((k * self.n + r) * self.n + c)
    }

    fn unpack<T: Real>(&self, x: &[T]) -> Vec<CMat<T>> {
        let n = self.n;
        (0..=self.degree)
            .map(|k| {
                CMat::from_fn(n, n, |r, c| {
                    let i = self.var(k, r, c);
                    Cx::new(x[i], x[i + 1])
                })
            })
            .collect()
    }

    fn pack<T: Real>(&self, a: &[CMat<T>]) -> Vec<T> {
        let mut x = vec![T::zero(); self.unknowns()];
        for (k, m) in a.iter().enumerate().take(self.degree + 1) {
            for r in 0..self.n {
                for c in 0..self.n {
                    let i = self.var(k, r, c);
                    x[i] = m[(r, c)].re;
                    x[i + 1] = m[(r, c)].im;
                }
            }
        }
        x
    }
}

fn evaluate_poly<T: Real>(a: &[CMat<T>], z: Cx<T>) -> CMat<T> {
    let n = a[0].rows();
    a.iter()
        .rev()
        .fold(CMat::zeros(n, n), |acc, c| &acc.scale(z) + c)
}

fn residuals<T: Real>(lay: &Layout, w: &Laurent<T>, a: &[CMat<T>], pins: &[Cx<T>]) -> Vec<T> {
    let n = lay.n;
    let d = lay.degree;
    let mut out = Vec::with_capacity(lay.equations());
    for l in 0..=d {
        let mut r = w.coeffs[l].scale(-cone::<T>());
        for k in 0..=d - l {
            r += &(&a[k].adjoint() * &a[k + l]);
        }
        for z in r.as_slice() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    let skew = &a[0] - &a[0].adjoint();
    for z in skew.as_slice() {
        out.push(z.re);
        out.push(z.im);
    }
    for &p in pins {
        let det = evaluate_poly(a, p).det();
        out.push(det.re);
        out.push(det.im);
    }
    debug_assert_eq!(out.len(), 2 * n * n * (d + 1) + 2 * n * n + 2 * pins.len());
    out
}

fn jacobian<T: Real>(lay: &Layout, a: &[CMat<T>], pins: &[Cx<T>]) -> Vec<T> {
    let n = lay.n;
    let d = lay.degree;
    let rows = lay.equations();
    let cols = lay.unknowns();
    let mut jac = vec![T::zero(); rows * cols];
    let pin_data: Vec<(CMat<T>, Vec<Cx<T>>)> = pins
        .iter()
        .map(|&p| {
            let powers = (0..=d).scan(cone::<T>(), |acc, _| {
                let v = *acc;
                *acc = *acc * p;
                Some(v)
            });
            (evaluate_poly(a, p).adjugate(), powers.collect())
        })
        .collect();
    let gauge_base = 2 * n * n * (d + 1);
    let pin_base = gauge_base + 2 * n * n;
    let entry = |block: usize, i: usize, j: usize| 2 * (block * n * n + i * n + j);
    for k in 0..=d {
        for r in 0..n {
            for c in 0..n {
                for part in 0..2 {
                    let col = lay.var(k, r, c) + part;
                    let e: Cx<T> = if part == 0 {
                        cone()
                    } else {
                        Cx::new(T::zero(), T::one())
                    };
                    let mut put = |row: usize, v: Cx<T>| {
                        jac[row * cols + col] = jac[row * cols + col] + v.re;
                        jac[(row + 1) * cols + col] = jac[(row + 1) * cols + col] + v.im;
                    };
                    for l in 0..=d {
                        // conj(e) E_cr A_{k+l}
                        if k + l <= d {
                            for j in 0..n {
                                put(entry(l, c, j), e.conj() * a[k + l][(r, j)]);
                            }
                        }
                        // A_{k-l}* e E_rc
                        if k >= l {
                            for i in 0..n {
                                put(entry(l, i, c), e * a[k - l][(r, i)].conj());
                            }
                        }
                    }
                    if k == 0 {
                        put(gauge_base + 2 * (r * n + c), e);
                        put(gauge_base + 2 * (c * n + r), -e.conj());
                    }
                    for (p, (adj, pow)) in pin_data.iter().enumerate() {
                        put(pin_base + 2 * p, adj[(c, r)] * pow[k] * e);
                    }
                }
            }
        }
    }
    jac
}

fn sum_sq<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |s, &x| s + x * x)
}

/// Levenberg–Marquardt on the coefficient equations, starting from `init`
/// (only its first `d + 1` coefficients are used). Returns the refined
/// coefficients and the final residual norm, or `None` if no step reduced
/// the residual.
pub(crate) fn polish<T: Real>(
    w: &Laurent<T>,
    init: &[CMat<T>],
    pins: &[Cx<T>],
) -> Option<(Vec<CMat<T>>, T)> {
    let n = w.size();
    let d = w.bandwidth();
    let lay = Layout {
        n,
        degree: d,
        pins: pins.len(),
    };
    let mut start: Vec<CMat<T>> = init.iter().take(d + 1).cloned().collect();
    while start.len() < d + 1 {
        start.push(CMat::zeros(n, n));
    }
    let mut x = lay.pack(&start);
    let mut r = residuals(&lay, w, &lay.unpack(&x), pins);
    let mut cost = sum_sq(&r);
    let initial = cost;
    let p = lay.unknowns();
    let q = lay.equations();
    let mut mu = lit::<T>(1e-12);
    let scale = w.coeffs[0].max_abs().max(T::min_positive_value());
    let tiny = scale * scale * T::epsilon() * T::epsilon();
    for _ in 0..80 {
        if cost <= tiny {
            break;
        }
        let a = lay.unpack(&x);
        let jac = jacobian(&lay, &a, pins);
        let mut jtj = vec![T::zero(); p * p];
        let mut jtr = vec![T::zero(); p];
        for row in 0..q {
            let jr = &jac[row * p..(row + 1) * p];
            let rv = r[row];
            for (i, &ji) in jr.iter().enumerate() {
                if ji == T::zero() {
                    continue;
                }
                jtr[i] = jtr[i] - ji * rv;
                for (j, &jj) in jr.iter().enumerate().skip(i) {
                    jtj[i * p + j] = jtj[i * p + j] + ji * jj;
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                jtj[i * p + j] = jtj[j * p + i];
            }
        }
        let diag = (0..p).fold(T::zero(), |m, i| m.max(jtj[i * p + i]));
        let mut improved = false;
        let mut step_norm = T::zero();
        for _ in 0..30 {
            let Some(delta) = solve_normal_equations(&jtj, &jtr, p, mu * diag) else {
                mu = mu * lit(10.0);
                continue;
            };
            let trial: Vec<T> = x.iter().zip(&delta).map(|(&xi, &di)| xi + di).collect();
            let r_trial = residuals(&lay, w, &lay.unpack(&trial), pins);
            let c_trial = sum_sq(&r_trial);
            if c_trial < cost {
                step_norm = sum_sq(&delta).sqrt();
                x = trial;
                r = r_trial;
                cost = c_trial;
                mu = (mu * lit(0.1)).max(lit(1e-15));
                improved = true;
                break;
            }
            mu = mu * lit(10.0);
        }
        if !improved {
            break;
        }
        if step_norm <= sum_sq(&x).sqrt() * T::epsilon() * lit(4.0) {
            break;
        }
    }
    if cost < initial || initial <= tiny {
        Some((lay.unpack(&x), cost.sqrt()))
    } else {
        None
    }
}

/// Density value `W(ζ)` from Laurent data, for tests and diagnostics.
#[allow(dead_code)]
pub(crate) fn laurent_value<T: Real>(w: &Laurent<T>, z: Cx<T>) -> CMat<T> {
    let mut out = w.coeffs[0].clone();
    let mut p: Cx<T> = cone();
    for c in w.coeffs.iter().skip(1) {
        p = p * z;
        out = &(&out + &c.scale(p)) + &c.adjoint().scale(p.conj());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn jacobian_matches_finite_differences() {
        let n = 2;
        let a: Vec<CMat<f64>> = vec![
            CMat::from_rows(&[
                vec![cx(1.0, 0.0), cx(0.2, 0.1)],
                vec![cx(0.2, -0.1), cx(0.9, 0.0)],
            ]),
            CMat::from_rows(&[
                vec![cx(0.3, 0.2), cx(-0.1, 0.0)],
                vec![cx(0.05, 0.4), cx(0.2, -0.3)],
            ]),
        ];
        let w = Laurent {
            coeffs: vec![CMat::identity(n), CMat::zeros(n, n)],
        };
        let pins = vec![unit(0.7)];
        let lay = Layout {
            n,
            degree: 1,
            pins: 1,
        };
        let x = lay.pack(&a);
        let jac = jacobian(&lay, &a, &pins);
        let h = 1e-7;
        for col in 0..lay.unknowns() {
            let mut xp = x.clone();
            xp[col] += h;
            let mut xm = x.clone();
            xm[col] -= h;
            let rp = residuals(&lay, &w, &lay.unpack(&xp), &pins);
            let rm = residuals(&lay, &w, &lay.unpack(&xm), &pins);
            for row in 0..lay.equations() {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!(
                    (fd - jac[row * lay.unknowns() + col]).abs() < 1e-6,
                    "row {row} col {col}"
                );
            }
        }
    }

    #[test]
    fn scalar_boundary_zero_is_found() {
        // |1 + z|^2 = 2 + z + 1/z vanishes at z = -1.
        let w = Laurent {
            coeffs: vec![CMat::scalar(cx(2.0, 0.0)), CMat::scalar(cx(1.0, 0.0))],
        };
        let zeros = boundary_zeros(&w, 1e-12);
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0] - cx(-1.0, 0.0)).norm() < 1e-12);
        let v = laurent_value(&w, cx(0.0, 1.0));
        assert!((v[(0, 0)] - cx(2.0, 0.0)).norm() < 1e-15);
        let (a, res) = polish(
            &w,
            &[CMat::scalar(cx(0.9, 0.0)), CMat::scalar(cx(1.1, 0.0))],
            &zeros,
        )
        .unwrap();
        assert!(res < 1e-14);
        assert!((a[0][(0, 0)] - cx(1.0, 0.0)).norm() < 1e-12);
        assert!((a[1][(0, 0)] - cx(1.0, 0.0)).norm() < 1e-12);
    }
}
