//! Characteristic determinant of the eigenvalue problem
//! `-g''' - g' = lambda g`, `g(0) = g'(L) = g''(L) = 0`.
//!
//! With `s_1, s_2, s_3` the roots of `s^3 + s + lambda = 0`, the boundary
//! rows applied to the basis `exp(s_j y)` give the determinant
//!
//! ```text
//! Delta = e^{(s2+s3)L} s2 s3 (s3-s2)
//!       + e^{(s1+s3)L} s3 s1 (s1-s3)
//!       + e^{(s1+s2)L} s1 s2 (s2-s1)
//! ```
//!
//! whose zeros are the eigenvalues. `Delta` is evaluated with the largest
//! exponential factored out so magnitudes up to `|lambda| ~ 1e6` stay
//! representable; the scale is reported so zeros are preserved.
//!
//! `Delta` is antisymmetric under permutations of the roots, so its value
//! (not its zero set) depends on the root ordering; with the ordering of
//! [`cubic_roots`] it flips sign across the surfaces where two roots share
//! a real part and is purely imaginary on the real axis. Root finding and
//! winding counts therefore run on the normalized function
//! `chi = Delta / V`, `V` the root Vandermonde: `chi` is symmetric in the
//! roots, analytic in `lambda`, conjugate symmetric, real on the real
//! axis, and has exactly the same zeros.

#[allow(unused_imports)]
use num_traits::Float;

use crate::cubic::{cubic_roots, CubicRoots};
use crate::error::{Error, Result};
use crate::scaled::Scaled;
use crate::Complex;

/// Scaled determinant value: `Delta = value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDet {
    pub value: Complex,
    pub log_scale: f64,
    /// Set when the root discriminant was numerically zero and the
    /// confluent limiting formula was used.
    pub confluent: bool,
}

impl ScaledDet {
    pub fn abs(&self) -> f64 {
        self.value.norm() * self.log_scale.exp()
    }

    /// Plain complex value; overflows to infinity if the scale is huge.
    pub fn unscaled(&self) -> Complex {
        self.value * self.log_scale.exp()
    }
}

/// The literal determinant `Delta(lambda)` (see module docs), scaled.
pub fn char_det(lambda: Complex, length: f64) -> ScaledDet {
    let roots = cubic_roots(lambda);
    if roots.degenerate {
        let conf = confluent_det(&roots, length);
        return ScaledDet {
            value: conf.val,
            log_scale: conf.exp,
            confluent: true,
        };
    }
    let (det, _) = det_terms(&roots, length);
    ScaledDet {
        value: det.val,
        log_scale: det.exp,
        confluent: false,
    }
}

/// `Delta` and `d Delta / d lambda` on a common scale.
fn det_terms(roots: &CubicRoots, length: f64) -> (Scaled, Scaled) {
    let s = roots.roots();
    let ds = roots.root_derivatives();
    // term_k pairs the two roots other than s_k
    let pairs = [(1usize, 2usize), (2, 0), (0, 1)];
    let mut m = f64::NEG_INFINITY;
    for &(i, j) in &pairs {
        m = m.max((s[i] + s[j]).re * length);
    }
    let mut det = Scaled::ZERO;
    let mut ddet = Scaled::ZERO;
    for &(i, j) in &pairs {
        let g = s[i] + s[j];
        let p = s[i] * s[j] * (s[j] - s[i]);
        let dp = ds[i] * s[j] * (s[j] - s[i])
            + s[i] * ds[j] * (s[j] - s[i])
            + s[i] * s[j] * (ds[j] - ds[i]);
        let e = Scaled::new(
            Complex::new((g.im * length).cos(), (g.im * length).sin()),
            g.re * length - m,
        );
        det = det.add(e.mul_complex(p));
        ddet = ddet.add(e.mul_complex((ds[i] + ds[j]) * length * p + dp));
    }
    (
        Scaled {
            val: det.to_complex(),
            exp: m,
        },
        Scaled {
            val: ddet.to_complex(),
            exp: m,
        },
    )
}

/// Limiting determinant when two roots collide (`s_i = s_j = s`): the
/// degenerate basis `{exp(s1 y), exp(s y), y exp(s y)}` replaces the pair.
/// Equals `lim Delta / (s_j - s_i)` up to a nonzero factor, so the zero
/// set matches the true characteristic function at the confluent point.
fn confluent_det(roots: &CubicRoots, length: f64) -> Scaled {
    let r = roots.roots();
    let (i, j) = roots.closest_pair();
    let k = 3 - i - j;
    let a = r[k];
    let s = (r[i] + r[j]) * 0.5;
    let l = length;
    // columns: [phi(0), phi'(L), phi''(L)] for phi in {e^{a y}, e^{s y}, y e^{s y}}
    let ea = Scaled::cexp(a * l);
    let es = Scaled::cexp(s * l);
    let c1 = [
        Scaled::from_complex(Complex::new(1.0, 0.0)),
        ea.mul_complex(a),
        ea.mul_complex(a * a),
    ];
    let c2 = [
        Scaled::from_complex(Complex::new(1.0, 0.0)),
        es.mul_complex(s),
        es.mul_complex(s * s),
    ];
    let one = Complex::new(1.0, 0.0);
    let c3 = [
        Scaled::ZERO,
        es.mul_complex(one + s * l),
        es.mul_complex(s * 2.0 + s * s * l),
    ];
    crate::scaled::det3(&c1, &c2, &c3)
}

/// Normalized characteristic function `chi = Delta / V` and its
/// `lambda`-derivative on a common scale (see module docs).
pub fn char_fn(lambda: Complex, length: f64) -> (Scaled, Scaled) {
    let roots = cubic_roots(lambda);
    let s = roots.roots();
    let ds = roots.root_derivatives();
    let v = (s[1] - s[0]) * (s[2] - s[0]) * (s[2] - s[1]);
    let dv = (ds[1] - ds[0]) * (s[2] - s[0]) * (s[2] - s[1])
        + (s[1] - s[0]) * (ds[2] - ds[0]) * (s[2] - s[1])
        + (s[1] - s[0]) * (s[2] - s[0]) * (ds[2] - ds[1]);
    let (det, ddet) = det_terms(&roots, length);
    let chi = det.mul_complex(Complex::new(1.0, 0.0) / v);
    // chi' = (Delta' V - Delta V') / V^2
    let dchi = ddet
        .mul_complex(Complex::new(1.0, 0.0) / v)
        .add(det.mul_complex(dv / (v * v)).neg());
    (chi, dchi)
}

/// Newton iteration for a zero of `chi` from `seed`. Converges to
/// `|step| < tol * max(1, |lambda|)` or reports divergence.
pub fn newton_eigenvalue(
    seed: Complex,
    length: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Complex> {
    let mut lam = seed;
    for _ in 0..max_iter {
        let (chi, dchi) = char_fn(lam, length);
        if dchi.is_zero() {
            return Err(Error::NewtonDivergence {
                seed,
                iterations: max_iter,
            });
        }
        let step = chi.div(dchi).to_complex();
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::NewtonDivergence {
                seed,
                iterations: max_iter,
            });
        }
        lam -= step;
        if step.norm() < tol * 1.0f64.max(lam.norm()) {
            return Ok(lam);
        }
    }
    Err(Error::NewtonDivergence {
        seed,
        iterations: max_iter,
    })
}

/// Argument-principle winding number of `chi` around a rectangle.
///
/// Contour sampling doubles until every phase increment is below pi/2 and
/// the total is within 0.25 windings of an integer.
pub fn winding_count(
    length: f64,
    re: (f64, f64),
    im: (f64, f64),
) -> Result<i64> {
    let mut n = 64usize;
    while n <= 32768 {
        let mut phases = WindingAccumulator::new();
        let sides: [(Complex, Complex); 4] = [
            (Complex::new(re.0, im.0), Complex::new(re.1, im.0)),
            (Complex::new(re.1, im.0), Complex::new(re.1, im.1)),
            (Complex::new(re.1, im.1), Complex::new(re.0, im.1)),
            (Complex::new(re.0, im.1), Complex::new(re.0, im.0)),
        ];
        let mut ok = true;
        'outer: for (a, b) in sides {
            for k in 0..n {
                let t = k as f64 / n as f64;
                let z = a + (b - a) * t;
                let (chi, _) = char_fn(z, length);
                if chi.is_zero() {
                    ok = false;
                    break 'outer;
                }
                if !phases.push(chi.arg()) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            if let Some(w) = phases.close() {
                return Ok(w);
            }
        }
        n *= 2;
    }
    Err(Error::WindingUnresolved)
}

struct WindingAccumulator {
    first: Option<f64>,
    prev: f64,
    total: f64,
}

impl WindingAccumulator {
    fn new() -> Self {
        WindingAccumulator {
            first: None,
            prev: 0.0,
            total: 0.0,
        }
    }

    fn push(&mut self, arg: f64) -> bool {
        match self.first {
            None => {
                self.first = Some(arg);
                self.prev = arg;
                true
            }
            Some(_) => {
                let d = wrap_angle(arg - self.prev);
                self.prev = arg;
                self.total += d;
                d.abs() < core::f64::consts::FRAC_PI_2
            }
        }
    }

    fn close(self) -> Option<i64> {
        let first = self.first?;
        let d = wrap_angle(first - self.prev);
        if d.abs() >= core::f64::consts::FRAC_PI_2 {
            return None;
        }
        let w = (self.total + d) / (2.0 * core::f64::consts::PI);
        let r = w.round();
        if (w - r).abs() < 0.25 {
            Some(r as i64)
        } else {
            None
        }
    }
}

fn wrap_angle(mut a: f64) -> f64 {
    while a > core::f64::consts::PI {
        a -= 2.0 * core::f64::consts::PI;
    }
    while a < -core::f64::consts::PI {
        a += 2.0 * core::f64::consts::PI;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_symmetry_off_axis() {
        // pseudo-random complex points away from the real axis
        let mut z = Complex::new(0.4, 1.3);
        for _ in 0..100 {
            z = z * Complex::new(1.07, 0.21) + Complex::new(-0.5, 0.9);
            let lam = z * 7.0;
            if lam.im.abs() < 1e-3 {
                continue;
            }
            let d1 = char_det(lam, 1.0);
            let d2 = char_det(lam.conj(), 1.0);
            let v1 = d1.value;
            let v2 = d2.value.conj();
            assert!(
                (d1.log_scale - d2.log_scale).abs() < 1e-10 * d1.log_scale.abs().max(1.0),
                "scales differ at {lam}"
            );
            assert!((v1 - v2).norm() < 1e-9 * v1.norm(), "values differ at {lam}");
        }
    }

    #[test]
    fn chi_is_real_on_the_real_axis() {
        for &x in &[-0.5, -6.0, -157.0, -4000.0] {
            let (chi, _) = char_fn(Complex::new(x, 0.0), 1.0);
            assert!(chi.val.im.abs() < 1e-10 * chi.val.norm().max(1e-300));
        }
    }

    #[test]
    fn no_zero_at_origin() {
        // Delta(0) = -2i for L = 1 up to scale
        let d = char_det(Complex::new(0.0, 0.0), 1.0);
        assert!(d.abs() > 0.1);
    }

    #[test]
    fn newton_finds_the_lowest_eigenvalue() {
        let lam = newton_eigenvalue(Complex::new(-6.0, 0.0), 1.0, 1e-13, 100).unwrap();
        assert!((lam - Complex::new(-6.680_209_910, 0.0)).norm() < 1e-6);
        let w = winding_count(1.0, (lam.re - 1e-3, lam.re + 1e-3), (-1e-3, 1e-3)).unwrap();
        assert_eq!(w, 1);
    }

    #[test]
    fn confluent_point_is_not_a_spurious_zero() {
        let lam = Complex::new(0.0, 2.0 / (3.0 * 3.0f64.sqrt()));
        let d = char_det(lam, 1.0);
        assert!(d.confluent);
        assert!(d.abs() > 1e-6, "confluent determinant should not vanish");
    }

    #[test]
    fn scaling_preserves_magnitude_for_huge_lambda() {
        // |lambda| = 1e6 on L = pi overflows without scaling
        let d = char_det(Complex::new(-1e6, 3.0), core::f64::consts::PI);
        assert!(d.value.norm().is_finite() && d.value.norm() > 0.0);
        assert!(d.log_scale > 100.0);
    }
}
