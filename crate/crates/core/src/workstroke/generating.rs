//! Transition probabilities from the generating function
//! `P(u, v) = √(2 / [Q*(1−u²)(1−v²) + (1+u²)(1+v²) − 4uv])`.
//!
//! The Taylor coefficients are computed with truncated bivariate power-series
//! arithmetic (`f = g^{-1/2}` via the J. C. P. Miller recurrence in `u`, with
//! coefficients that are series in `v`), so no derivatives are formed.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Largest supported index.
pub const MAX_INDEX: usize = 64;

type Series = Vec<f64>;

fn mul(a: &[f64], b: &[f64], k: usize) -> Series {
    let mut out = vec![0.0; k];
    for (i, ai) in a.iter().enumerate().take(k) {
        if *ai == 0.0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(k - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `g^power` for a univariate series with `g[0] > 0`.
fn pow(g: &[f64], power: f64, k: usize) -> Series {
    let mut f = vec![0.0; k];
    f[0] = g[0].powf(power);
    for n in 1..k {
        let mut s = 0.0;
        for i in 1..=n.min(g.len() - 1) {
            s += (power * i as f64 - (n - i) as f64) * g[i] * f[n - i];
        }
        f[n] = s / (n as f64 * g[0]);
    }
    f
}

/// `P_mn` for `m, n ≤ max_index`.
pub fn transition_probabilities(qstar: f64, max_index: usize) -> Result<DMatrix<f64>> {
    if !(qstar >= 1.0) {
        return Err(invalid("qstar", format!("must be at least 1, got {qstar}")));
    }
    if max_index > MAX_INDEX {
        return Err(invalid("max_index", format!("at most {MAX_INDEX}, got {max_index}")));
    }
    let k = max_index + 1;
    // D(u,v) = Σ_i u^i d_i(v), d_i polynomial in v
    let q = qstar;
    let mut d: Vec<Series> = vec![vec![0.0; k]; 3];
    let set = |s: &mut Series, idx: usize, val: f64| {
        if idx < s.len() {
            s[idx] += val;
        }
    };
    // u^0: Q(1−v²) + (1+v²)
    set(&mut d[0], 0, q + 1.0);
    set(&mut d[0], 2, 1.0 - q);
    // u^1: −4v
    set(&mut d[1], 1, -4.0);
    // u^2: −Q(1−v²) + (1+v²)
    set(&mut d[2], 0, 1.0 - q);
    set(&mut d[2], 2, q + 1.0);

    let d0_inv = pow(&d[0], -1.0, k);
    let mut f: Vec<Series> = Vec::with_capacity(k);
    f.push(pow(&d[0], -0.5, k));
    for n in 1..k {
        let mut acc = vec![0.0; k];
        for (i, di) in d.iter().enumerate().skip(1).take(n.min(2)) {
            let coeff = -0.5 * i as f64 - (n - i) as f64;
            let term = mul(di, &f[n - i], k);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += coeff * t;
            }
        }
        let mut fn_ = mul(&d0_inv, &acc, k);
        fn_.iter_mut().for_each(|x| *x /= n as f64);
        f.push(fn_);
    }
    let s2 = std::f64::consts::SQRT_2;
    Ok(DMatrix::from_fn(k, k, |m, n| s2 * f[m][n]))
}
