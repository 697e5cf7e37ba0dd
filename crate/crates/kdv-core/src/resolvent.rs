//! Resolvent norm profiles along the imaginary axis.
//!
//! Per frequency the operator norm of `R(i w, A)` is estimated as the
//! largest singular value of the discretized resolvent, by power
//! iteration on `R R^H` through banded solves; the Hilbert–Schmidt norm
//! comes from 2D quadrature of `|G|^2` over the square.
//!
//! The centered interior stencils annihilate the two-grid checkerboard
//! mode, so the raw discrete resolvent carries a convergent parasitic
//! response (order 0.09 at `w = 100`, independent of resolution) that
//! does not belong to the continuous operator and would exceed the
//! Hilbert–Schmidt bound. The operator norm is therefore measured on the
//! filtered resolvent `S R S` with `S` the `(1,2,1)/4` smoother, which
//! removes the parasitic mode exactly and perturbs resolved content by
//! `O(dx^2)`; the kernel-quadrature oracle in the tests confirms
//! agreement with the continuous norm at the percent level.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fitting::linear_fit;
use crate::green::{simpson_split, GreenKernel};
use crate::grid::{BcVariant, Grid};
use crate::operator::OperatorMatrix;
use crate::scaled::Scaled;
use crate::Complex;

/// Operator-norm and Hilbert–Schmidt profiles over a frequency list.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventProfile {
    pub omegas: Vec<f64>,
    /// Largest singular value of the filtered discrete resolvent.
    pub norms: Vec<f64>,
    /// Hilbert–Schmidt quadrature values of the continuous kernel.
    pub hs_norms: Vec<f64>,
    /// Least-squares slope of `log(norm)` vs `log(omega)` over the fit
    /// window (defaults to the full range).
    pub fitted_slope: f64,
    /// Entries where power iteration stagnated and the dense fallback
    /// supplied the value.
    pub fallback: Vec<bool>,
}

const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITERS: usize = 4000;

/// Profile `||R(i w, A)||` over the given positive increasing
/// frequencies, on the wave-maker discretization of the grid.
pub fn resolvent_norm_profile(
    grid: &Grid,
    omegas: &[f64],
    fit_window: Option<(f64, f64)>,
) -> Result<ResolventProfile> {
    if omegas.is_empty() {
        return Err(Error::InvalidConfig("no frequencies given".into()));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) || omegas[0] <= 0.0 {
        return Err(Error::InvalidConfig(
            "frequencies must be positive and increasing".into(),
        ));
    }
    let op = OperatorMatrix::build(grid.clone(), BcVariant::ColinGhidaglia)?;
    let mut norms = Vec::with_capacity(omegas.len());
    let mut hs = Vec::with_capacity(omegas.len());
    let mut fallback = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let (n, fb) = operator_norm(&op, w)?;
        norms.push(n);
        hs.push(hs_norm(Complex::new(0.0, w), grid.length())?);
        fallback.push(fb);
    }
    let (lo, hi) = fit_window.unwrap_or((omegas[0], *omegas.last().unwrap()));
    let pts: Vec<(f64, f64)> = omegas
        .iter()
        .zip(&norms)
        .filter(|(w, _)| **w >= lo && **w <= hi)
        .map(|(w, n)| (w.ln(), n.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::EmptyFit);
    }
    let (slope, _, _) = linear_fit(&pts);
    Ok(ResolventProfile {
        omegas: omegas.to_vec(),
        norms,
        hs_norms: hs,
        fitted_slope: slope,
        fallback,
    })
}

/// Largest singular value of the filtered discrete resolvent at `i w`.
/// Returns `(value, used_fallback)`.
pub fn operator_norm(op: &OperatorMatrix, omega: f64) -> Result<(f64, bool)> {
    let sigma = Complex::new(0.0, omega);
    let m = op.assemble(sigma, Complex::new(-1.0, 0.0));
    let mh = m.conj_transpose();
    let lu = m.factor().map_err(|_| Error::SingularShift { shift: sigma })?;
    let luh = mh.factor().map_err(|_| Error::SingularShift { shift: sigma })?;
    let n = op.grid().n_nodes();
    let pde_mask = pde_mask(op);

    let apply_b = |x: &[Complex], buf: &mut Vec<Complex>| {
        // B = S R S with R = M^{-1} E
        *buf = smooth(x);
        mask(buf, &pde_mask);
        lu.solve_in_place(buf);
        *buf = smooth(buf);
    };
    let apply_bh = |x: &[Complex], buf: &mut Vec<Complex>| {
        // B^H = S E M^{-H} S
        *buf = smooth(x);
        luh.solve_in_place(buf);
        mask(buf, &pde_mask);
        *buf = smooth(buf);
    };

    // deterministic start vector with broad spectral content
    let mut x: Vec<Complex> = (0..n)
        .map(|i| {
            let t = i as f64;
            Complex::new((0.7 * t).sin() + 0.31, (1.3 * t).cos() * 0.5)
        })
        .collect();
    normalize(&mut x);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut sigma2_prev = 0.0f64;
    for _ in 0..POWER_MAX_ITERS {
        apply_b(&x, &mut buf);
        let sigma2: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        apply_bh(&buf.clone(), &mut x);
        normalize(&mut x);
        if (sigma2 - sigma2_prev).abs() <= POWER_TOL * sigma2 {
            return Ok((sigma2.sqrt(), false));
        }
        sigma2_prev = sigma2;
    }
    // stagnation: dense Gram matrix + Jacobi eigenvalues
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Complex::new(0.0, 0.0); n];
        e[j] = Complex::new(1.0, 0.0);
        let mut c = vec![Complex::new(0.0, 0.0); n];
        apply_b(&e, &mut c);
        cols.push(c);
    }
    let mut gram = vec![vec![Complex::new(0.0, 0.0); n]; n];
    for a in 0..n {
        for b in a..n {
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..n {
                acc += cols[a][k].conj() * cols[b][k];
            }
            gram[a][b] = acc;
            gram[b][a] = acc.conj();
        }
    }
    let lam = hermitian_max_eigenvalue(&mut gram);
    Ok((lam.max(0.0).sqrt(), true))
}

fn pde_mask(op: &OperatorMatrix) -> Vec<bool> {
    let n = op.grid().n_nodes();
    let mut mask = vec![true; n];
    for br in op.boundary_rows() {
        mask[br.row] = false;
    }
    mask
}

fn mask(x: &mut [Complex], keep: &[bool]) {
    for (v, k) in x.iter_mut().zip(keep) {
        if !k {
            *v = Complex::new(0.0, 0.0);
        }
    }
}

/// The `(1,2,1)/4` interior smoother (endpoints pass through).
fn smooth(x: &[Complex]) -> Vec<Complex> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    out.push(x[0]);
    for i in 1..n - 1 {
        out.push(x[i - 1] * 0.25 + x[i] * 0.5 + x[i + 1] * 0.25);
    }
    out.push(x[n - 1]);
    out
}

fn normalize(x: &mut [Complex]) {
    let n: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
}

/// Hilbert–Schmidt norm by 2D Simpson quadrature of `|G|^2`, node count
/// adapted to the `w^{1/3}` oscillation scale.
pub fn hs_norm(lambda: Complex, length: f64) -> Result<f64> {
    let b = lambda.norm().cbrt();
    let mut nq = (3.0 * b * length).ceil() as usize;
    nq = nq.max(96);
    if nq % 2 == 1 {
        nq += 1;
    }
    let kernel = GreenKernel::new(lambda, length)?;
    let h = length / nq as f64;
    let s = kernel.roots();
    // inner integral over y (split at the kink), one column per xi
    let mut column = vec![Complex::new(0.0, 0.0); nq + 1];
    let mut outer = vec![Complex::new(0.0, 0.0); nq + 1];
    let exps: Vec<[Scaled; 3]> = (0..=nq)
        .map(|i| {
            let y = i as f64 * h;
            [
                Scaled::cexp(s[0] * y),
                Scaled::cexp(s[1] * y),
                Scaled::cexp(s[2] * y),
            ]
        })
        .collect();
    for j in 0..=nq {
        let xi = j as f64 * h;
        let coeffs = kernel.coefficients(xi);
        for i in 0..=nq {
            let mut acc = Scaled::ZERO;
            for k in 0..3 {
                acc = acc.add(exps[i][k].mul(coeffs.ratio[k]));
                if i > j {
                    acc = acc.add(exps[i][k].mul(coeffs.jump[k]));
                }
            }
            let g = acc.to_complex();
            column[i] = Complex::new(g.norm_sqr(), 0.0);
        }
        outer[j] = simpson_split(&column, h, j);
    }
    let total = simpson_split(&outer, h, 0).re;
    Ok(total.max(0.0).sqrt())
}

/// Largest eigenvalue of a Hermitian matrix by cyclic Jacobi rotations
/// (destroys the input).
pub fn hermitian_max_eigenvalue(a: &mut [Vec<Complex>]) -> f64 {
    let n = a.len();
    for _sweep in 0..30 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q].norm_sqr();
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                // unitary 2x2 diagonalization of [[app, apq], [apq^*, aqq]]
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * c - akq * sp.conj();
                    a[k][q] = akp * sp + akq * c;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = apk * c - aqk * sp;
                    a[q][k] = apk * sp.conj() + aqk * c;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i].re).fold(f64::NEG_INFINITY, f64::max)
}
