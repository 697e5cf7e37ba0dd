//! Least-squares fits: exponential decay rates and small linear models.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Result of an exponential decay fit `norm(t) ~ C e^{-rate t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    /// Smallest norm admitted into the fit.
    pub floor: f64,
    pub points: usize,
}

/// Default floor below which samples are rounding-dominated.
pub const DECAY_FLOOR: f64 = 1e-12;

/// Least squares on `log(norm)` vs `t` over the window; `rate = -slope`.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    fit_decay_with_floor(series, window, DECAY_FLOOR)
}

pub fn fit_decay_with_floor(
    series: &[(f64, f64)],
    window: (f64, f64),
    floor: f64,
) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, v)| *t >= window.0 && *t <= window.1 && *v > floor)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyFit);
    }
    if pts.len() < 10 {
        return Err(Error::InvalidConfig(alloc::format!(
            "decay fit needs at least 10 points above the floor, got {}",
            pts.len()
        )));
    }
    let (slope, intercept, r2) = linear_fit(&pts);
    Ok(DecayFit {
        rate: -slope,
        amplitude: intercept.exp(),
        r_squared: r2,
        window,
        floor,
        points: pts.len(),
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, r^2)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy - a * sx) / n;
    let mean = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in pts {
        let p = a * x + b;
        ss_res += (y - p) * (y - p);
        ss_tot += (y - mean) * (y - mean);
    }
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (a, b, r2)
}

/// Solve the normal equations of `X beta = y` for a small column count,
/// returning the coefficients and the diagonal of `(X^T X)^{-1}` (for
/// confidence intervals). `X` is given row-major.
pub fn least_squares(
    rows: &[Vec<f64>],
    y: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::EmptyFit);
    }
    let p = rows[0].len();
    let mut xtx = alloc::vec![alloc::vec![0.0f64; p]; p];
    let mut xty = alloc::vec![0.0f64; p];
    for (row, &yi) in rows.iter().zip(y) {
        for a in 0..p {
            xty[a] += row[a] * yi;
            for b in 0..p {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let inv = invert_small(&xtx).ok_or(Error::EmptyFit)?;
    let mut beta = alloc::vec![0.0f64; p];
    for a in 0..p {
        for b in 0..p {
            beta[a] += inv[a][b] * xty[b];
        }
    }
    let diag = (0..p).map(|a| inv[a][a]).collect();
    Ok((beta, diag))
}

fn invert_small(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().cloned().collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for c in 0..n {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in 0..n {
                    a[r][c] -= f * a[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
    }
    Some(inv)
}
