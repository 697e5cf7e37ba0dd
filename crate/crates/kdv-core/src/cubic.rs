//! Roots of the characteristic cubic `s^3 + s + lambda = 0`.
//!
//! Exponential solutions `exp(s y)` of `w''' + w' + lambda w = 0` have
//! exponents given by this depressed cubic. Roots are computed by the
//! Cardano closed form with a branch choice that avoids cancellation,
//! then polished with one Newton step.


use crate::Complex;

/// Discriminant threshold below which two roots are treated as confluent.
pub const DEGENERATE_DISCRIMINANT: f64 = 1e-12;

/// The three roots of `s^3 + s + lambda = 0`, ordered by descending real
/// part, ties broken by descending imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub lambda: Complex,
    pub s1: Complex,
    pub s2: Complex,
    pub s3: Complex,
    /// Cardano discriminant `lambda^2/4 + 1/27`.
    pub discriminant: Complex,
    /// Set when `|discriminant| < 1e-12`: two roots are numerically
    /// confluent and downstream formulas switch to limiting forms.
    pub degenerate: bool,
}

impl CubicRoots {
    pub fn roots(&self) -> [Complex; 3] {
        [self.s1, self.s2, self.s3]
    }

    /// `max_j |s_j^3 + s_j + lambda|`.
    pub fn residual(&self) -> f64 {
        self.roots()
            .iter()
            .map(|&s| (s * s * s + s + self.lambda).norm())
            .fold(0.0, f64::max)
    }

    /// `d s_j / d lambda = -1 / (3 s_j^2 + 1)`, by implicit differentiation.
    pub fn root_derivatives(&self) -> [Complex; 3] {
        let one = Complex::new(1.0, 0.0);
        self.roots()
            .map(|s| -one / (Complex::new(3.0, 0.0) * s * s + one))
    }

    /// Indices `(i, j)` of the closest root pair (the confluent pair when
    /// `degenerate` is set).
    pub fn closest_pair(&self) -> (usize, usize) {
        let r = self.roots();
        let mut best = (0, 1);
        let mut dist = f64::INFINITY;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = (r[i] - r[j]).norm();
                if d < dist {
                    dist = d;
                    best = (i, j);
                }
            }
        }
        best
    }
}

/// Solve `s^3 + s + lambda = 0`.
pub fn cubic_roots(lambda: Complex) -> CubicRoots {
    // depressed cubic with p = 1, q = lambda
    let q = lambda;
    let half_q = q * 0.5;
    let disc = half_q * half_q + Complex::new(1.0 / 27.0, 0.0);
    let mut t = disc.sqrt();
    let u = -half_q;
    // pick the sqrt branch that adds constructively to -q/2
    if (u.conj() * t).re < 0.0 {
        t = -t;
    }
    let alpha = (u + t).cbrt();
    // alpha * beta = -p/3 = -1/3 exactly; deriving beta from alpha keeps the
    // pair on consistent branches
    let beta = Complex::new(-1.0 / 3.0, 0.0) / alpha;
    let w = Complex::from_polar(1.0, 2.0 * core::f64::consts::PI / 3.0);
    let w2 = w * w;
    let mut roots = [alpha + beta, w * alpha + w2 * beta, w2 * alpha + w * beta];

    for s in roots.iter_mut() {
        let f = *s * *s * *s + *s + lambda;
        let df = Complex::new(3.0, 0.0) * *s * *s + Complex::new(1.0, 0.0);
        if df.norm() > 1e-8 {
            *s -= f / df;
        }
    }

    roots.sort_unstable_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });

    CubicRoots {
        lambda,
        s1: roots[0],
        s2: roots[1],
        s3: roots[2],
        discriminant: disc,
        degenerate: disc.norm() < DEGENERATE_DISCRIMINANT,
    }
}
