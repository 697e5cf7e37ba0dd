//! Green's function of `(lambda I - A)` on `(0, L)` and the resolvent as
//! an integral operator.
//!
//! `G(y, xi; lambda)` solves
//! `G''' + G' + lambda G = delta(y - xi)` in `y` with
//! `G(0) = G'(L) = G''(L) = 0` and has the closed form
//!
//! ```text
//! G = sum_j c_j e^{s_j (y-xi)} + H(y-xi) sum_j chat_j e^{s_j (y-xi)}
//! ```
//!
//! with `H(0) = 0`, `chat` solving the jump system (unit jump in the
//! second derivative) and `c` solving the boundary system by Cramer's
//! rule: `c_j = e^{s_j xi} Delta_j / Delta`. All exponential algebra runs
//! in scaled arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use crate::chardet::char_fn;
use crate::cubic::{cubic_roots, CubicRoots};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scaled::{det3, Scaled};
use crate::Complex;

/// Relative closeness to the spectrum below which evaluation refuses.
const SINGULAR_DISTANCE: f64 = 1e-8;

/// Coefficients of the Green's function at one `(lambda, xi)`.
#[derive(Debug, Clone)]
pub struct GreenCoefficients {
    pub lambda: Complex,
    pub xi: f64,
    /// Jump-system coefficients.
    pub c_hat: [Complex; 3],
    /// Boundary-system coefficients `c_j = e^{s_j xi} Delta_j / Delta`.
    pub c: [Complex; 3],
    /// Boundary determinant (scaled value and log-scale).
    pub delta: Scaled,
    /// Cramer numerators, on their own scales.
    pub delta_j: [Scaled; 3],
    pub d2: Complex,
    pub d3: Complex,
    /// `Delta_j / Delta` kept scaled; the form actually used for
    /// evaluation.
    pub(crate) ratio: [Scaled; 3],
    /// `chat_j e^{-s_j xi}`, scaled, for the jump part.
    pub(crate) jump: [Scaled; 3],
}

/// Per-`lambda` state shared across source locations `xi`.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub lambda: Complex,
    pub length: f64,
    roots: CubicRoots,
    c_hat: [Complex; 3],
    delta: Scaled,
}

impl GreenKernel {
    pub fn new(lambda: Complex, length: f64) -> Result<Self> {
        let roots = cubic_roots(lambda);
        // distance to the nearest eigenvalue, estimated as |chi| / |chi'|
        let (chi, dchi) = char_fn(lambda, length);
        if !dchi.is_zero() {
            let dist = chi.div(dchi).abs();
            if dist < SINGULAR_DISTANCE {
                return Err(Error::NearEigenvalue {
                    det_magnitude: chi.abs(),
                });
            }
        }
        let s = roots.roots();
        let c_hat = [
            Complex::new(1.0, 0.0) / ((s[1] - s[0]) * (s[2] - s[0])),
            Complex::new(1.0, 0.0) / ((s[0] - s[1]) * (s[2] - s[1])),
            Complex::new(1.0, 0.0) / ((s[0] - s[2]) * (s[1] - s[2])),
        ];
        let delta = boundary_det(&s, length);
        Ok(GreenKernel {
            lambda,
            length,
            roots,
            c_hat,
            delta,
        })
    }

    pub fn roots(&self) -> [Complex; 3] {
        self.roots.roots()
    }

    pub fn c_hat(&self) -> [Complex; 3] {
        self.c_hat
    }

    /// Solve the boundary system for the source location `xi`.
    pub fn coefficients(&self, xi: f64) -> GreenCoefficients {
        let s = self.roots.roots();
        let l = self.length;
        // d2 = -sum chat_j s_j e^{s_j (L-xi)}, d3 with s_j^2
        let mut d2 = Scaled::ZERO;
        let mut d3v = Scaled::ZERO;
        for j in 0..3 {
            let e = Scaled::cexp(s[j] * (l - xi));
            d2 = d2.add(e.mul_complex(self.c_hat[j] * s[j]).neg());
            d3v = d3v.add(e.mul_complex(self.c_hat[j] * s[j] * s[j]).neg());
        }
        // columns of the boundary matrix
        let col = |j: usize| -> [Scaled; 3] {
            let e = Scaled::cexp(s[j] * l);
            [
                Scaled::from_complex(Complex::new(1.0, 0.0)),
                e.mul_complex(s[j]),
                e.mul_complex(s[j] * s[j]),
            ]
        };
        let cols = [col(0), col(1), col(2)];
        let rhs = [Scaled::ZERO, d2, d3v];
        let delta_j = [
            det3(&rhs, &cols[1], &cols[2]),
            det3(&cols[0], &rhs, &cols[2]),
            det3(&cols[0], &cols[1], &rhs),
        ];
        let mut ratio = [Scaled::ZERO; 3];
        let mut c = [Complex::new(0.0, 0.0); 3];
        let mut jump = [Scaled::ZERO; 3];
        for j in 0..3 {
            ratio[j] = delta_j[j].div(self.delta);
            c[j] = Scaled::cexp(s[j] * xi).mul(ratio[j]).to_complex();
            jump[j] = Scaled::cexp(-s[j] * xi).mul_complex(self.c_hat[j]);
        }
        GreenCoefficients {
            lambda: self.lambda,
            xi,
            c_hat: self.c_hat,
            c,
            delta: self.delta,
            delta_j,
            d2: d2.to_complex(),
            d3: d3v.to_complex(),
            ratio,
            jump,
        }
    }

    /// Evaluate `G(y, xi)` given precomputed coefficients for `xi`.
    pub fn eval(&self, coeffs: &GreenCoefficients, y: f64) -> Complex {
        let s = self.roots.roots();
        let mut acc = Scaled::ZERO;
        let with_jump = y > coeffs.xi; // Heaviside with H(0) = 0
        for j in 0..3 {
            let e = Scaled::cexp(s[j] * y);
            // c_j e^{s_j(y-xi)} = (Delta_j/Delta) e^{s_j y}
            acc = acc.add(e.mul(coeffs.ratio[j]));
            if with_jump {
                acc = acc.add(e.mul(coeffs.jump[j]));
            }
        }
        acc.to_complex()
    }
}

/// The boundary determinant, identical to the characteristic determinant.
fn boundary_det(s: &[Complex; 3], l: f64) -> Scaled {
    let col = |j: usize| -> [Scaled; 3] {
        let e = Scaled::cexp(s[j] * l);
        [
            Scaled::from_complex(Complex::new(1.0, 0.0)),
            e.mul_complex(s[j]),
            e.mul_complex(s[j] * s[j]),
        ]
    };
    det3(&col(0), &col(1), &col(2))
}

/// Evaluate the Green's function at a single point.
pub fn green_eval(y: f64, xi: f64, lambda: Complex, length: f64) -> Result<Complex> {
    let kernel = GreenKernel::new(lambda, length)?;
    let coeffs = kernel.coefficients(xi);
    Ok(kernel.eval(&coeffs, y))
}

/// Apply the resolvent to a sampled function by quadrature of the kernel:
/// `w(y) = int_0^L G(y, xi) f(xi) d xi`, composite Simpson split at the
/// kink `xi = y`.
pub fn resolvent_apply(f: &[f64], lambda: Complex, grid: &Grid) -> Result<Vec<Complex>> {
    if f.len() != grid.n_nodes() {
        return Err(Error::InvalidConfig(
            "sample count does not match the grid".into(),
        ));
    }
    let kernel = GreenKernel::new(lambda, grid.length())?;
    let n = grid.n_nodes();
    let s = kernel.roots();
    // per-xi coefficient sets
    let coeffs: Vec<GreenCoefficients> = (0..n).map(|j| kernel.coefficients(grid.node(j))).collect();
    // per-y exponentials
    let exps: Vec<[Scaled; 3]> = (0..n)
        .map(|i| {
            let y = grid.node(i);
            [
                Scaled::cexp(s[0] * y),
                Scaled::cexp(s[1] * y),
                Scaled::cexp(s[2] * y),
            ]
        })
        .collect();
    let h = grid.dx();
    let mut out = vec![Complex::new(0.0, 0.0); n];
    let mut row = vec![Complex::new(0.0, 0.0); n];
    for i in 0..n {
        for (j, c) in coeffs.iter().enumerate() {
            let with_jump = i > j; // y > xi on the uniform grid
            let mut acc = Scaled::ZERO;
            for k in 0..3 {
                acc = acc.add(exps[i][k].mul(c.ratio[k]));
                if with_jump {
                    acc = acc.add(exps[i][k].mul(c.jump[k]));
                }
            }
            row[j] = acc.to_complex() * f[j];
        }
        out[i] = simpson_split(&row, h, i);
    }
    Ok(out)
}

/// Composite Simpson over `[0, (n-1)h]` with the integrand split at node
/// `kink`. Odd interval counts close with a 3/8 block; single intervals
/// fall back to the trapezoid.
pub fn simpson_split(vals: &[Complex], h: f64, kink: usize) -> Complex {
    simpson_block(&vals[..=kink], h) + simpson_block(&vals[kink..], h)
}

fn simpson_block(vals: &[Complex], h: f64) -> Complex {
    let m = vals.len().saturating_sub(1); // interval count
    if m == 0 {
        return Complex::new(0.0, 0.0);
    }
    if m == 1 {
        return (vals[0] + vals[1]) * (h / 2.0);
    }
    let mut acc = Complex::new(0.0, 0.0);
    let even_end = if m % 2 == 0 { m } else { m - 3 };
    if even_end > 0 {
        let mut sum4 = Complex::new(0.0, 0.0);
        let mut sum2 = Complex::new(0.0, 0.0);
        let mut k = 1;
        while k < even_end {
            sum4 += vals[k];
            k += 2;
        }
        let mut k = 2;
        while k < even_end {
            sum2 += vals[k];
            k += 2;
        }
        acc += (vals[0] + vals[even_end] + sum4 * 4.0 + sum2 * 2.0) * (h / 3.0);
    }
    if m % 2 != 0 {
        if m == 1 {
            unreachable!()
        }
        // 3/8 rule on the last three intervals
        let b = m - 3;
        acc += (vals[b] + vals[b + 1] * 3.0 + vals[b + 2] * 3.0 + vals[b + 3]) * (3.0 * h / 8.0);
        if even_end == 0 && m > 3 {
            // m odd and m - 3 == 0 only when m == 3; handled above
        }
    }
    acc
}
