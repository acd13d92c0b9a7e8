//! Direct two-dimensional Gauss–Hermite quadrature of the propagator kernel
//! `K(x, x0) = (2πiX)^{-1/2} exp[i(Ẋ x² − 2 x x0 + Y x0²) / 2X]`.
//!
//! The Gaussian part of the integrand is `exp(−vᵀ M v / 2)` with a complex
//! symmetric `M`. Writing `M = Rᵀ R` (complex Cholesky, no conjugation) and
//! substituting `u = R v / √2` turns the integral into a standard
//! Gauss–Hermite one, exact for the polynomial remainder. The high Hermite
//! functions still cancel strongly under this rule, so the result is accurate
//! only on the low block (about 1e-9 on 30 levels); it serves as an
//! independent cross-check of the recurrence.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{integrate_trajectory, propagator::Propagator, RampSpec};
use crate::error::{Error, Result};
use crate::qmath::{CMatrix, C64};

pub const QUADRATURE_NODES: usize = 200;

/// `|X(τ)|` below which the kernel prefactor is treated as singular.
pub const FOCAL_TOL: f64 = 1e-6;

/// Nodes and weights for `∫ e^{-u²} f(u) du`.
///
/// Golub–Welsch for the starting nodes, then Newton polishing on the
/// normalised Hermite recurrence; weights are `1 / Σ_k h_k(u)²`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 || i == j + 1 {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let h = hermite_functions(n + 1, *x);
            let deriv = (2.0 * n as f64).sqrt() * h[n - 1];
            *x -= h[n] / deriv;
        }
        let h = hermite_functions(n, *x);
        weights.push(1.0 / h.iter().map(|v| v * v).sum::<f64>());
    }
    (nodes, weights)
}

/// Orthonormal Hermite polynomials `h_0 … h_{count−1}` at a real point.
fn hermite_functions(count: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    out[0] = std::f64::consts::PI.powf(-0.25);
    if count > 1 {
        out[1] = std::f64::consts::SQRT_2 * z * out[0];
    }
    for k in 2..count {
        let kf = k as f64;
        out[k] = (2.0 / kf).sqrt() * z * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
    }
    out
}

fn hermite_functions_complex(count: usize, z: C64, out: &mut [C64]) {
    out[0] = C64::new(std::f64::consts::PI.powf(-0.25), 0.0);
    if count > 1 {
        out[1] = std::f64::consts::SQRT_2 * z * out[0];
    }
    for k in 2..count {
        let kf = k as f64;
        out[k] = (2.0 / kf).sqrt() * z * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
    }
}

/// `U_mn` for `m, n < n_levels` by quadrature with `nodes` points per axis.
///
/// The overall sign (the branch of the square root in the prefactor) is taken
/// from the continuously tracked trajectory phase via `reference`, which must
/// be the recurrence propagator of the same ramp.
pub fn propagator_quadrature(
    ramp: &RampSpec,
    n_levels: usize,
    nodes: usize,
    reference: Option<&Propagator>,
) -> Result<CMatrix> {
    let traj = integrate_trajectory(ramp)?;
    let x = traj.x_end;
    if x.abs() < FOCAL_TOL {
        return Err(Error::FocalPoint { x_end: x });
    }
    let (w1, w2) = (ramp.omega_start, ramp.omega_end);
    let i = C64::i();
    let m11 = w2 - i * (traj.xdot_end / x);
    let m12 = i / x;
    let m22 = w1 - i * (traj.y_end / x);
    let r11 = m11.sqrt();
    let r12 = m12 / r11;
    let r22 = (m22 - r12 * r12).sqrt();
    let (u, w) = gauss_hermite(nodes);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut f = vec![C64::new(0.0, 0.0); n_levels];
    let mut g = vec![C64::new(0.0, 0.0); n_levels];
    let mut acc = CMatrix::zeros(n_levels, n_levels);
    for (a, &ua) in u.iter().enumerate() {
        for (b, &ub) in u.iter().enumerate() {
            let wt = w[a] * w[b];
            if wt == 0.0 {
                continue;
            }
            let x0 = sqrt2 * ub / r22;
            let xf = (sqrt2 * ua - r12 * x0) / r11;
            hermite_functions_complex(n_levels, xf * w2.sqrt(), &mut f);
            hermite_functions_complex(n_levels, x0 * w1.sqrt(), &mut g);
            for (n, gn) in g.iter().enumerate() {
                let gw = gn * wt;
                for (m, fm) in f.iter().enumerate() {
                    acc[(m, n)] += fm * gw;
                }
            }
        }
    }
    let prefactor = 2.0 / (r11 * r22) * (2.0 * std::f64::consts::PI * i * x).powf(-0.5) * (w1 * w2).powf(0.25);
    let mut out = acc * prefactor;
    if let Some(p) = reference {
        let r = p.matrix()[(0, 0)] / out[(0, 0)];
        if r.re < 0.0 {
            out = -out;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workstroke::propagator_matrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nodes_integrate_polynomials() {
        let (x, w) = gauss_hermite(40);
        let pi = std::f64::consts::PI;
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(a, b)| a * a * b).sum();
        let m8: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(8) * b).sum();
        assert_abs_diff_eq!(m0, pi.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(m2, pi.sqrt() / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m8, 105.0 / 16.0 * pi.sqrt(), epsilon = 1e-11);
    }

    #[test]
    fn quadrature_agrees_with_recurrence() {
        for &tau in &[0.25, 1.0, 4.0] {
            let ramp = RampSpec::new(1.0, 4.0, tau).unwrap();
            let rec = propagator_matrix(&ramp, 20).unwrap();
            let quad = propagator_quadrature(&ramp, 20, 80, Some(&rec)).unwrap();
            assert!((rec.matrix() - quad).camax() < 1e-8, "tau {tau}");
        }
    }
}
