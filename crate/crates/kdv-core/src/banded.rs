//! Complex banded matrices with LU factorization and partial pivoting.
//!
//! Storage follows the LAPACK general-band convention: a matrix with `kl`
//! sub- and `ku` superdiagonals is stored column-wise in a
//! `(2 kl + ku + 1) x n` array so that row interchanges during the
//! factorization have room to widen the upper band to `kl + ku`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Complex;

/// Banded matrix in expanded band storage.
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// `data[col * ldab + (kl + ku + row - col)]` holds `A[row, col]`.
    data: Vec<Complex>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            data: vec![Complex::new(0.0, 0.0); ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row + self.ku >= col && col + self.kl >= row);
        col * self.ldab() + (self.kl + self.ku + row - col)
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex) {
        let i = self.idx(row, col);
        self.data[i] = v;
    }

    pub fn add(&mut self, row: usize, col: usize, v: Complex) {
        let i = self.idx(row, col);
        self.data[i] += v;
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        if row + self.ku < col || col + self.kl < row {
            return Complex::new(0.0, 0.0);
        }
        self.data[self.idx(row, col)]
    }

    /// Clear an entire row inside the band.
    pub fn clear_row(&mut self, row: usize) {
        let lo = row.saturating_sub(self.kl);
        let hi = (row + self.ku).min(self.n - 1);
        for col in lo..=hi {
            let i = self.idx(row, col);
            self.data[i] = Complex::new(0.0, 0.0);
        }
    }

    pub fn matvec(&self, x: &[Complex], y: &mut [Complex]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for row in 0..self.n {
            let lo = row.saturating_sub(self.kl);
            let hi = (row + self.ku).min(self.n - 1);
            let mut acc = Complex::new(0.0, 0.0);
            for col in lo..=hi {
                acc += self.data[self.idx(row, col)] * x[col];
            }
            y[row] = acc;
        }
    }

    /// Conjugate-transposed matrix as a new banded matrix (kl and ku swap).
    pub fn conj_transpose(&self) -> Banded {
        let mut out = Banded::zeros(self.n, self.ku, self.kl);
        for row in 0..self.n {
            let lo = row.saturating_sub(self.kl);
            let hi = (row + self.ku).min(self.n - 1);
            for col in lo..=hi {
                let v = self.data[self.idx(row, col)];
                if v != Complex::new(0.0, 0.0) {
                    out.set(col, row, v.conj());
                }
            }
        }
        out
    }

    /// LU-factorize in place with partial pivoting.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let ldab = self.ldab();
        let mut pivots = vec![0usize; n];
        // effective upper bandwidth after pivoting
        let kv = kl + ku;
        for j in 0..n {
            // find pivot in column j among rows j..=min(j+kl, n-1)
            let pmax = (j + kl).min(n - 1);
            let mut piv = j;
            let mut pmag = self.data[j * ldab + (kl + ku)].norm();
            for r in (j + 1)..=pmax {
                let m = self.data[j * ldab + (kl + ku + r - j)].norm();
                if m > pmag {
                    pmag = m;
                    piv = r;
                }
            }
            if pmag == 0.0 || !pmag.is_finite() {
                return Err(Error::SingularShift {
                    shift: Complex::new(f64::NAN, f64::NAN),
                });
            }
            pivots[j] = piv;
            // swap rows j and piv across columns j..=min(j+kv, n-1)
            if piv != j {
                let cmax = (j + kv).min(n - 1);
                for c in j..=cmax {
                    let ia = c * ldab + (kl + ku + j - c);
                    let ib = c * ldab + (kl + ku + piv - c);
                    self.data.swap(ia, ib);
                }
            }
            // eliminate below the diagonal
            let diag = self.data[j * ldab + (kl + ku)];
            for r in (j + 1)..=pmax {
                let i = j * ldab + (kl + ku + r - j);
                let mult = self.data[i] / diag;
                self.data[i] = mult;
                if mult != Complex::new(0.0, 0.0) {
                    let cmax = (j + kv).min(n - 1);
                    for c in (j + 1)..=cmax {
                        let iu = c * ldab + (kl + ku + j - c);
                        let ir = c * ldab + (kl + ku + r - c);
                        let u = self.data[iu];
                        self.data[ir] -= mult * u;
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            data: self.data,
            pivots,
        })
    }
}

/// LU factors of a banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<Complex>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex]) {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let ldab = 2 * kl + ku + 1;
        let kv = kl + ku;
        // forward: apply pivots and L
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != Complex::new(0.0, 0.0) {
                let rmax = (j + kl).min(n - 1);
                for r in (j + 1)..=rmax {
                    let l = self.data[j * ldab + (kl + ku + r - j)];
                    b[r] -= l * bj;
                }
            }
        }
        // backward: U x = y
        for j in (0..n).rev() {
            let cmax = (j + kv).min(n - 1);
            let mut acc = b[j];
            for c in (j + 1)..=cmax {
                acc -= self.data[c * ldab + (kl + ku + j - c)] * b[c];
            }
            b[j] = acc / self.data[j * ldab + (kl + ku)];
        }
    }

    /// Solve for a real right-hand side, returning a complex solution.
    pub fn solve_real(&self, b: &[f64]) -> Vec<Complex> {
        let mut z: Vec<Complex> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.solve_in_place(&mut z);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn dense_mul(a: &Banded, x: &[Complex]) -> Vec<Complex> {
        let mut y = vec![Complex::new(0.0, 0.0); a.n()];
        a.matvec(x, &mut y);
        y
    }

    #[test]
    fn random_banded_solve_has_small_residual() {
        // deterministic pseudo-random fill
        let n = 60;
        let (kl, ku) = (3, 4);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut a = Banded::zeros(n, kl, ku);
        for row in 0..n {
            for col in row.saturating_sub(kl)..=(row + ku).min(n - 1) {
                a.set(row, col, Complex::new(rnd(), rnd()));
            }
            // diagonal dominance not required; pivoting handles it
        }
        let x: Vec<Complex> = (0..n).map(|_| Complex::new(rnd(), rnd())).collect();
        let b = dense_mul(&a, &x);
        let lu = a.clone().factor().unwrap();
        let mut sol = b.clone();
        lu.solve_in_place(&mut sol);
        let err: f64 = sol
            .iter()
            .zip(&x)
            .map(|(s, t)| (s - t).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let nrm: f64 = x.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10 * nrm, "relative error {}", err / nrm);
    }

    #[test]
    fn conj_transpose_solve_matches() {
        let n = 40;
        let (kl, ku) = (3, 4);
        let mut state = 123456789u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(99991);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut a = Banded::zeros(n, kl, ku);
        for row in 0..n {
            for col in row.saturating_sub(kl)..=(row + ku).min(n - 1) {
                a.set(row, col, Complex::new(rnd(), rnd()));
            }
        }
        let x: Vec<Complex> = (0..n).map(|_| Complex::new(rnd(), rnd())).collect();
        let ah = a.conj_transpose();
        let b = dense_mul(&ah, &x);
        let lu = ah.factor().unwrap();
        let mut sol = b;
        lu.solve_in_place(&mut sol);
        let err: f64 = sol.iter().zip(&x).map(|(s, t)| (s - t).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-9);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = Banded::zeros(5, 1, 1);
        for i in 0..5 {
            a.set(i, i, Complex::new(1.0, 0.0));
        }
        a.set(2, 2, Complex::new(0.0, 0.0));
        a.set(2, 1, Complex::new(0.0, 0.0));
        a.set(2, 3, Complex::new(0.0, 0.0));
        a.set(1, 2, Complex::new(0.0, 0.0));
        a.set(3, 2, Complex::new(0.0, 0.0));
        assert!(matches!(a.factor(), Err(Error::SingularShift { .. })));
    }
}
