//! Grid norms, the fractional Gagliardo seminorm, and windowed Y-norm
//! reports.
//!
//! Spatial norms are trapezoid quadratures on the uniform grid; `H^1` uses
//! centered interior differences with second-order one-sided closures.
//! The boundary trace norm of `(h1, h2, h3)` over a window is the
//! Gagliardo `H^{1/3}` seminorm plus `L^2` for `h1`, `L^2` for `h2`, and
//! an `L^2` upper surrogate for the negative-order `h3` slot, flagged as
//! such in every report.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Trapezoid `L^2(0, L)` norm of node samples.
pub fn l2_norm(u: &[f64], dx: f64) -> f64 {
    let n = u.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.5 * (u[0] * u[0] + u[n - 1] * u[n - 1]);
    for v in &u[1..n - 1] {
        acc += v * v;
    }
    (acc * dx).sqrt()
}

/// First derivative samples: centered interior, second-order one-sided at
/// the endpoints.
pub fn gradient(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let mut g = Vec::with_capacity(n);
    g.push((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx));
    for i in 1..n - 1 {
        g.push((u[i + 1] - u[i - 1]) / (2.0 * dx));
    }
    g.push((3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx));
    g
}

/// `H^1(0, L)` norm: `(||u||^2 + ||u'||^2)^{1/2}`.
pub fn h1_norm(u: &[f64], dx: f64) -> f64 {
    let g = gradient(u, dx);
    (l2_norm(u, dx).powi(2) + l2_norm(&g, dx).powi(2)).sqrt()
}

/// Gagliardo seminorm of a sampled time signal:
/// `( double-integral |h(t)-h(s)|^2 / |t-s|^{1+2 theta} dt ds )^{1/2}`,
/// trapezoid weights, excluding the diagonal band `|t-s| < dt`.
pub fn gagliardo_seminorm(h: &[f64], dt: f64, theta: f64) -> Result<f64> {
    if h.len() < 16 {
        return Err(Error::InvalidConfig(
            "gagliardo seminorm needs at least 16 samples".into(),
        ));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidConfig(
            "fractional order must lie in (0, 1)".into(),
        ));
    }
    let n = h.len();
    let p = 1.0 + 2.0 * theta;
    let mut acc = 0.0;
    for i in 0..n {
        let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        for j in (i + 1)..n {
            // |t_i - t_j| = (j - i) dt >= dt excludes only the diagonal
            let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            let d = h[i] - h[j];
            let tau = (j - i) as f64 * dt;
            acc += 2.0 * wi * wj * d * d / tau.powf(p);
        }
    }
    Ok((acc * dt * dt).sqrt())
}

/// One sliding-window norm report.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    /// Window start time.
    pub t_start: f64,
    /// `sup_t ||u(t)||_{L^2}` over the window.
    pub sup_l2: f64,
    /// `( int ||u(t)||_{H^1}^2 dt )^{1/2}` over the window.
    pub int_h1: f64,
    /// `sup_l2 + int_h1`.
    pub y_norm: f64,
    /// Surrogate boundary trace norm of `(h1, h2, h3)` over the window.
    pub boundary_b_norm: f64,
    /// Always true: the `h3` component uses the `L^2` upper surrogate.
    pub b_norm_is_surrogate: bool,
}

/// Y-norm of a state sequence over one window (trapezoid in time).
pub fn y_norm_of(states: &[Vec<f64>], dx: f64, dt: f64) -> f64 {
    let mut sup = 0.0f64;
    let mut acc = 0.0f64;
    let m = states.len();
    for (k, u) in states.iter().enumerate() {
        let l2 = l2_norm(u, dx);
        sup = sup.max(l2);
        let h1 = h1_norm(u, dx);
        let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
        acc += w * h1 * h1;
    }
    sup + (acc * dt).sqrt()
}

/// Surrogate B-norm of boundary samples over a window:
/// Gagliardo `H^{1/3}` + `L^2` for `h1`, `L^2` for `h2` and `h3`.
pub fn boundary_b_norm(h: &[[f64; 3]], dt: f64) -> f64 {
    let n = h.len();
    if n < 2 {
        return 0.0;
    }
    let h1: Vec<f64> = h.iter().map(|t| t[0]).collect();
    let l2_of = |k: usize| {
        let mut acc = 0.5 * (h[0][k] * h[0][k] + h[n - 1][k] * h[n - 1][k]);
        for row in &h[1..n - 1] {
            acc += row[k] * row[k];
        }
        (acc * dt).sqrt()
    };
    let frac = if n >= 16 {
        gagliardo_seminorm(&h1, dt, 1.0 / 3.0).unwrap_or(0.0)
    } else {
        0.0
    };
    (frac * frac + l2_of(0).powi(2) + l2_of(1).powi(2) + l2_of(2).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_signal_has_zero_seminorm() {
        let h = vec![3.7; 64];
        assert_eq!(gagliardo_seminorm(&h, 0.01, 1.0 / 3.0).unwrap(), 0.0);
    }

    #[test]
    fn seminorm_is_homogeneous() {
        let n = 128;
        let dt = 1.0 / (n as f64 - 1.0);
        let h: Vec<f64> = (0..n)
            .map(|i| (2.0 * core::f64::consts::PI * i as f64 * dt).sin())
            .collect();
        let h3: Vec<f64> = h.iter().map(|v| 3.0 * v).collect();
        let a = gagliardo_seminorm(&h, dt, 1.0 / 3.0).unwrap();
        let b = gagliardo_seminorm(&h3, dt, 1.0 / 3.0).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn l2_matches_closed_form() {
        // ||sin(pi x)||_{L^2(0,1)} = 1/sqrt(2)
        let n = 513;
        let dx = 1.0 / (n as f64 - 1.0);
        let u: Vec<f64> = (0..n)
            .map(|i| (core::f64::consts::PI * i as f64 * dx).sin())
            .collect();
        let v = l2_norm(&u, dx);
        assert!((v - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn short_signal_is_rejected() {
        assert!(gagliardo_seminorm(&[1.0; 8], 0.1, 0.5).is_err());
    }

    #[test]
    fn norm_monotone_under_pointwise_domination() {
        let n = 64;
        let dx = 1.0 / (n as f64 - 1.0);
        let u: Vec<f64> = (0..n).map(|i| 0.5 * (i as f64 * dx)).collect();
        let v: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        assert!(l2_norm(&u, dx) <= l2_norm(&v, dx));
    }
}
