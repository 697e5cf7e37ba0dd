//! Complex numbers carried as `value * exp(log_scale)`.
//!
//! The characteristic determinant and the Green's function algebra involve
//! exponentials `exp(s_j L)` whose real parts grow like `|lambda|^{1/3} L`;
//! at `|lambda| ~ 1e6` on longer intervals these overflow `f64`. Carrying
//! an explicit real log-scale keeps every intermediate representable while
//! ratios and zero locations stay exact.

#[allow(unused_imports)]
use num_traits::Float;

use crate::Complex;

/// A complex number stored as `val * exp(exp)` with `val` kept at a
/// moderate magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub val: Complex,
    pub exp: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        val: Complex::new(0.0, 0.0),
        exp: 0.0,
    };

    pub fn new(val: Complex, exp: f64) -> Self {
        Scaled { val, exp }.normalized()
    }

    pub fn from_complex(z: Complex) -> Self {
        Scaled::new(z, 0.0)
    }

    /// `exp(z)` without overflow: the real part moves into the scale.
    pub fn cexp(z: Complex) -> Self {
        Scaled {
            val: Complex::new(z.im.cos(), z.im.sin()),
            exp: z.re,
        }
    }

    fn normalized(self) -> Self {
        let m = self.val.norm();
        if m == 0.0 || !m.is_finite() {
            return Scaled {
                val: self.val,
                exp: if m == 0.0 { 0.0 } else { self.exp },
            };
        }
        // keep |val| in [1e-8, 1e8]
        if m > 1e8 || m < 1e-8 {
            let shift = m.ln();
            Scaled {
                val: self.val / m,
                exp: self.exp + shift,
            }
        } else {
            self
        }
    }

    pub fn mul(self, other: Scaled) -> Self {
        Scaled::new(self.val * other.val, self.exp + other.exp)
    }

    pub fn mul_complex(self, z: Complex) -> Self {
        Scaled::new(self.val * z, self.exp)
    }

    pub fn div(self, other: Scaled) -> Self {
        Scaled::new(self.val / other.val, self.exp - other.exp)
    }

    pub fn add(self, other: Scaled) -> Self {
        if self.val == Complex::new(0.0, 0.0) {
            return other;
        }
        if other.val == Complex::new(0.0, 0.0) {
            return self;
        }
        // rescale the smaller term onto the larger scale
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (lo.exp - hi.exp).exp();
        Scaled::new(hi.val + lo.val * shift, hi.exp)
    }

    pub fn neg(self) -> Self {
        Scaled {
            val: -self.val,
            exp: self.exp,
        }
    }

    /// Collapse to a plain complex number (may overflow to infinity if the
    /// scale is genuinely huge; callers only do this for bounded results).
    pub fn to_complex(self) -> Complex {
        self.val * self.exp.exp()
    }

    pub fn abs(self) -> f64 {
        self.val.norm() * self.exp.exp()
    }

    pub fn ln_abs(self) -> f64 {
        self.val.norm().ln() + self.exp
    }

    pub fn arg(self) -> f64 {
        self.val.arg()
    }

    pub fn is_zero(self) -> bool {
        self.val == Complex::new(0.0, 0.0)
    }
}

/// Determinant of a 3x3 matrix given by columns, in scaled arithmetic.
pub(crate) fn det3(c1: &[Scaled; 3], c2: &[Scaled; 3], c3: &[Scaled; 3]) -> Scaled {
    let minor = |x: &[Scaled; 3], y: &[Scaled; 3]| {
        x[1].mul(y[2]).add(x[2].mul(y[1]).neg())
    };
    c1[0]
        .mul(minor(c2, c3))
        .add(c2[0].mul(minor(c1, c3)).neg())
        .add(c3[0].mul(minor(c1, c2)))
}
