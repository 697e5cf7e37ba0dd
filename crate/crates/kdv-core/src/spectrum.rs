//! Eigenvalue search for `A g = -g''' - g'` with `g(0) = g'(L) = g''(L) = 0`.
//!
//! All eigenvalues have negative real part and obey
//! `lambda_k = -8 pi^3 k^3 / (3 sqrt(3) L^3) + O(k^2)`. High modes are
//! located by Newton iteration on the normalized characteristic function
//! from asymptotic seeds; the low modes, where the asymptotics are poor,
//! come from an argument-principle subdivision of a box next to the
//! origin. Candidates are merged, deduplicated and indexed by descending
//! real part.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::chardet::{char_det, newton_eigenvalue, winding_count};
use crate::error::{Error, Result};
use crate::Complex;

/// One located eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueRecord {
    /// Mode number, 1-based, ordered by descending real part.
    pub index: usize,
    pub lambda: Complex,
    /// `|Delta(lambda)|` after polishing (scaled value at the common
    /// local scale; see `residual_scale`).
    pub residual: f64,
    /// Max `|Delta|` over a circle of radius 1 around `lambda`, the local
    /// scale against which `residual` is meaningful.
    pub residual_scale: f64,
    /// The seed the Newton iteration started from (the polished low-mode
    /// candidates from box subdivision record their box center).
    pub seed: Complex,
    /// `-8 pi^3 k^3 / (3 sqrt(3) L^3)`.
    pub asymptotic_prediction: Complex,
    /// `|lambda - asymptotic_prediction| / |asymptotic_prediction|`.
    pub relative_deviation: f64,
    /// False when the argument-principle validation around this record
    /// did not count exactly one zero.
    pub winding_validated: bool,
}

/// Result of an eigenvalue search: the validated records plus any seeds
/// whose Newton iteration failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSet {
    pub length: f64,
    pub records: Vec<EigenvalueRecord>,
    pub dropped_seeds: Vec<Complex>,
}

/// Asymptotic seed for the k-th eigenvalue: `mu = (2k-1) pi / (sqrt(3) L)`
/// and `lambda = -mu^3 + mu`.
pub fn asymptotic_seed(k: usize, length: f64) -> Complex {
    let mu = (2 * k - 1) as f64 * core::f64::consts::PI / (3.0f64.sqrt() * length);
    Complex::new(-mu * mu * mu + mu, 0.0)
}

/// Leading-order eigenvalue law `-8 pi^3 k^3 / (3 sqrt(3) L^3)`.
pub fn asymptotic_prediction(k: usize, length: f64) -> Complex {
    let pi = core::f64::consts::PI;
    let k3 = (k * k * k) as f64;
    Complex::new(-8.0 * pi * pi * pi * k3 / (3.0 * 3.0f64.sqrt() * length.powi(3)), 0.0)
}

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;
const DEDUP_DISTANCE: f64 = 1e-6;

/// Find the first `count` eigenvalues for interval length `length`.
pub fn find_eigenvalues(length: f64, count: usize) -> Result<EigenvalueSet> {
    if length <= 0.0 {
        return Err(Error::InvalidConfig("interval length must be positive".into()));
    }
    if count == 0 {
        return Err(Error::InvalidConfig("eigenvalue count must be >= 1".into()));
    }

    let mut candidates: Vec<(Complex, Complex)> = Vec::new(); // (lambda, seed)
    let mut dropped = Vec::new();

    // low modes: argument-principle subdivision of the box next to the origin
    let mut low = Vec::new();
    subdivide_box(length, (-200.0, -1e-3), (-100.0, 100.0), 0, &mut low)?;
    for z in low {
        candidates.push((z, z));
    }

    // high modes from asymptotic seeds; k = 1, 2 are covered by the box
    let mut k = 3usize;
    let mut extra_budget = count + 4;
    while k <= extra_budget {
        let seed = asymptotic_seed(k, length);
        match newton_eigenvalue(seed, length, NEWTON_TOL, NEWTON_MAX_ITER) {
            Ok(lam) => candidates.push((lam, seed)),
            Err(Error::NewtonDivergence { .. }) => dropped.push(seed),
            Err(e) => return Err(e),
        }
        if enough_candidates(&candidates, count) && k >= count {
            break;
        }
        if k == extra_budget && !enough_candidates(&candidates, count) {
            extra_budget += 2;
            if extra_budget > count + 16 {
                break;
            }
        }
        k += 1;
    }

    // deduplicate and order by descending real part
    let mut unique: Vec<(Complex, Complex)> = Vec::new();
    for (lam, seed) in candidates {
        if !unique.iter().any(|(u, _)| (*u - lam).norm() < DEDUP_DISTANCE) {
            unique.push((lam, seed));
        }
    }
    unique.sort_unstable_by(|a, b| {
        b.0.re
            .partial_cmp(&a.0.re)
            .unwrap()
            .then(b.0.im.partial_cmp(&a.0.im).unwrap())
    });
    unique.truncate(count);

    let mut records = Vec::with_capacity(unique.len());
    for (i, (lam, seed)) in unique.into_iter().enumerate() {
        let index = i + 1;
        let pred = asymptotic_prediction(index, length);
        let det = char_det(lam, length);
        let scale = residual_scale(lam, length, det.log_scale);
        let validated = winding_count(
            length,
            (lam.re - 1e-3, lam.re + 1e-3),
            (lam.im - 1e-3, lam.im + 1e-3),
        )
        .map(|w| w == 1)
        .unwrap_or(false);
        records.push(EigenvalueRecord {
            index,
            lambda: lam,
            residual: det.value.norm(),
            residual_scale: scale,
            seed,
            asymptotic_prediction: pred,
            relative_deviation: (lam - pred).norm() / pred.norm(),
            winding_validated: validated,
        });
    }

    Ok(EigenvalueSet {
        length,
        records,
        dropped_seeds: dropped,
    })
}

fn enough_candidates(c: &[(Complex, Complex)], count: usize) -> bool {
    c.len() >= count + 2
}

/// Max `|Delta|` over a radius-1 circle, on the same scale as the value
/// reported at the center.
fn residual_scale(lambda: Complex, length: f64, center_log_scale: f64) -> f64 {
    let mut max = 0.0f64;
    for k in 0..32 {
        let t = 2.0 * core::f64::consts::PI * k as f64 / 32.0;
        let z = lambda + Complex::new(t.cos(), t.sin());
        let d = char_det(z, length);
        let v = d.value.norm() * (d.log_scale - center_log_scale).exp();
        max = max.max(v);
    }
    max
}

/// Recursive argument-principle subdivision: collect every zero of the
/// characteristic function inside the rectangle.
fn subdivide_box(
    length: f64,
    re: (f64, f64),
    im: (f64, f64),
    depth: usize,
    out: &mut Vec<Complex>,
) -> Result<()> {
    let w = winding_count(length, re, im)?;
    if w == 0 {
        return Ok(());
    }
    let small = (re.1 - re.0) < 0.5 && (im.1 - im.0) < 0.5;
    if w == 1 && small {
        let center = Complex::new(0.5 * (re.0 + re.1), 0.5 * (im.0 + im.1));
        let lam = newton_eigenvalue(center, length, NEWTON_TOL, NEWTON_MAX_ITER)?;
        out.push(lam);
        return Ok(());
    }
    if depth > 48 {
        return Err(Error::WindingUnresolved);
    }
    // split lines slightly off-center so zeros do not sit on a cut
    let rm = 0.5 * (re.0 + re.1) + 0.013 * (re.1 - re.0);
    let imm = 0.5 * (im.0 + im.1) + 0.017 * (im.1 - im.0);
    subdivide_box(length, (re.0, rm), (im.0, imm), depth + 1, out)?;
    subdivide_box(length, (rm, re.1), (im.0, imm), depth + 1, out)?;
    subdivide_box(length, (re.0, rm), (imm, im.1), depth + 1, out)?;
    subdivide_box(length, (rm, re.1), (imm, im.1), depth + 1, out)?;
    Ok(())
}

/// Zeros of the characteristic function inside a caller-supplied box,
/// found by exhaustive subdivision (the test oracle for counting).
pub fn zeros_in_box(length: f64, re: (f64, f64), im: (f64, f64)) -> Result<Vec<Complex>> {
    let mut out = Vec::new();
    subdivide_box(length, re, im, 0, &mut out)?;
    out.sort_unstable_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    Ok(out)
}
