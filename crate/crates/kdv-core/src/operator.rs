//! Finite-difference discretization of `A g = -g''' - g'` with boundary
//! closures for both condition families.
//!
//! Unknowns are the node values `u_0 .. u_{N+1}`. The PDE is imposed at
//! rows `1 ..= N-1` (centered second-order stencils; the third derivative
//! at row 1 uses a one-point-biased six-point stencil), and the three
//! boundary conditions replace rows `0`, `N` and `N+1`. Bandwidths stay
//! within `kl = 3`, `ku = 4`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::{Banded, BandedLu};
use crate::error::{Error, Result};
use crate::grid::{BcVariant, Grid};
use crate::Complex;

pub const KL: usize = 3;
pub const KU: usize = 4;

/// One boundary row: which node values it combines and the datum it
/// equals. `matrix_row * u = h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub row: usize,
    /// `(column, weight)` pairs.
    pub stencil: Vec<(usize, f64)>,
    /// Index into the boundary triple `(h1, h2, h3)` this row carries.
    pub datum: usize,
}

/// Discrete operator with boundary closures and lifting information.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: Grid,
    bc: BcVariant,
    d3_row1: [f64; 6],
    d3_at0: [f64; 6],
    d3_at_n: [f64; 6],
    d3_at_n1: [f64; 6],
    boundary_rows: [BoundaryRow; 3],
}

/// Second-order one-sided first derivative at the left endpoint.
pub fn d1_left(u: &[f64], dx: f64) -> f64 {
    (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
}

/// Second-order one-sided first derivative at the right endpoint.
pub fn d1_right(u: &[f64], dx: f64) -> f64 {
    let n = u.len();
    (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx)
}

/// Second-order one-sided second derivative at the left endpoint.
pub fn d2_left(u: &[f64], dx: f64) -> f64 {
    (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (dx * dx)
}

/// Finite-difference weights for the `order`-th derivative on the given
/// integer offsets (unit spacing), by solving the moment system.
fn fd_weights<const W: usize>(offsets: [i64; W], order: usize) -> [f64; W] {
    let mut a = [[0.0f64; W]; W];
    let mut b = [0.0f64; W];
    for (r, row) in a.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = (offsets[c] as f64).powi(r as i32);
        }
    }
    let mut fact = 1.0;
    for k in 1..=order {
        fact *= k as f64;
    }
    b[order] = fact;
    solve_dense::<W>(&mut a, &mut b);
    b
}

/// Gaussian elimination with partial pivoting for the tiny weight systems.
fn solve_dense<const W: usize>(a: &mut [[f64; W]; W], b: &mut [f64; W]) {
    for col in 0..W {
        let mut piv = col;
        for r in (col + 1)..W {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if piv != col {
            a.swap(col, piv);
            b.swap(col, piv);
        }
        let d = a[col][col];
        for r in (col + 1)..W {
            let m = a[r][col] / d;
            if m != 0.0 {
                for c in col..W {
                    a[r][c] -= m * a[col][c];
                }
                b[r] -= m * b[col];
            }
        }
    }
    for col in (0..W).rev() {
        let mut acc = b[col];
        for c in (col + 1)..W {
            acc -= a[col][c] * b[c];
        }
        b[col] = acc / a[col][col];
    }
}

/// Build the discrete operator; alias for [`OperatorMatrix::build`].
pub fn build_operator(grid: Grid, bc: BcVariant) -> Result<OperatorMatrix> {
    OperatorMatrix::build(grid, bc)
}

impl OperatorMatrix {
    pub fn build(grid: Grid, bc: BcVariant) -> Result<Self> {
        if grid.n_interior() < Grid::MIN_INTERIOR {
            return Err(Error::InvalidConfig(
                "grid too small for the stencil widths".into(),
            ));
        }
        let dx = grid.dx();
        let n = grid.n_interior();
        let scale3 = |w: [f64; 6]| w.map(|v| v / (dx * dx * dx));
        let d3_row1 = scale3(fd_weights([-1, 0, 1, 2, 3, 4], 3));
        let d3_at0 = scale3(fd_weights([0, 1, 2, 3, 4, 5], 3));
        let d3_at_n = scale3(fd_weights([-4, -3, -2, -1, 0, 1], 3));
        let d3_at_n1 = scale3(fd_weights([-5, -4, -3, -2, -1, 0], 3));

        let boundary_rows = match bc {
            BcVariant::ColinGhidaglia => [
                BoundaryRow {
                    row: 0,
                    stencil: vec![(0, 1.0)],
                    datum: 0,
                },
                BoundaryRow {
                    row: n,
                    stencil: vec![
                        (n + 1, 3.0 / (2.0 * dx)),
                        (n, -4.0 / (2.0 * dx)),
                        (n - 1, 1.0 / (2.0 * dx)),
                    ],
                    datum: 1,
                },
                BoundaryRow {
                    row: n + 1,
                    stencil: vec![
                        (n + 1, 2.0 / (dx * dx)),
                        (n, -5.0 / (dx * dx)),
                        (n - 1, 4.0 / (dx * dx)),
                        (n - 2, -1.0 / (dx * dx)),
                    ],
                    datum: 2,
                },
            ],
            BcVariant::Dirichlet => [
                BoundaryRow {
                    row: 0,
                    stencil: vec![(0, 1.0)],
                    datum: 0,
                },
                BoundaryRow {
                    row: n + 1,
                    stencil: vec![(n + 1, 1.0)],
                    datum: 1,
                },
                BoundaryRow {
                    row: n,
                    stencil: vec![
                        (n + 1, 3.0 / (2.0 * dx)),
                        (n, -4.0 / (2.0 * dx)),
                        (n - 1, 1.0 / (2.0 * dx)),
                    ],
                    datum: 2,
                },
            ],
        };

        Ok(OperatorMatrix {
            grid,
            bc,
            d3_row1,
            d3_at0,
            d3_at_n,
            d3_at_n1,
            boundary_rows,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bc(&self) -> BcVariant {
        self.bc
    }

    /// Rows carrying the PDE: `1 ..= N-1`.
    pub fn pde_rows(&self) -> core::ops::RangeInclusive<usize> {
        1..=(self.grid.n_interior() - 1)
    }

    pub fn boundary_rows(&self) -> &[BoundaryRow; 3] {
        &self.boundary_rows
    }

    /// The lifting map: `h_k` enters the assembled right-hand side at
    /// `lifting()[k]` with unit weight (boundary rows are replaced, so the
    /// affine boundary contribution is exactly the datum on its row).
    pub fn lifting(&self) -> [usize; 3] {
        let mut rows = [0usize; 3];
        for br in &self.boundary_rows {
            rows[br.datum] = br.row;
        }
        rows
    }

    /// Entries `(col, weight)` of row `i` of the discrete `A = -D3 - D1`,
    /// valid for PDE rows.
    fn a_row(&self, i: usize, mut emit: impl FnMut(usize, f64)) {
        let dx = self.grid.dx();
        let inv2dx = 1.0 / (2.0 * dx);
        let inv2dx3 = 1.0 / (2.0 * dx * dx * dx);
        if i == 1 {
            // -D3 via the biased six-point stencil, offsets -1..=4
            for (k, w) in self.d3_row1.iter().enumerate() {
                emit(k, -w);
            }
            emit(0, inv2dx);
            emit(2, -inv2dx);
        } else {
            emit(i - 2, -(-inv2dx3));
            emit(i - 1, -(2.0 * inv2dx3) + inv2dx);
            emit(i + 1, -(-2.0 * inv2dx3) - inv2dx);
            emit(i + 2, -inv2dx3);
        }
    }

    /// `A u` on the PDE rows, zero elsewhere.
    pub fn apply_interior(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.grid.n_nodes());
        let mut out = vec![0.0; u.len()];
        for i in self.pde_rows() {
            let mut acc = 0.0;
            self.a_row(i, |c, w| acc += w * u[c]);
            out[i] = acc;
        }
        out
    }

    /// `A u` at every node, using biased stencils at the four near-boundary
    /// rows. For diagnostics (dissipativity quadrature, equation residuals);
    /// solves never use the boundary-node rows.
    pub fn apply_full(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n_interior();
        let dx = self.grid.dx();
        let mut out = self.apply_interior(u);
        let d3 = |w: &[f64; 6], base: usize| -> f64 {
            w.iter()
                .enumerate()
                .map(|(k, &wv)| wv * u[base + k])
                .sum::<f64>()
        };
        out[0] = -d3(&self.d3_at0, 0) - d1_left(u, dx);
        out[n] = -d3(&self.d3_at_n, n - 4) - (u[n + 1] - u[n - 1]) / (2.0 * dx);
        out[n + 1] = -d3(&self.d3_at_n1, n - 4) - d1_right(u, dx);
        out
    }

    /// Trapezoid quadrature of `u . (A u)` over the interval.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let au = self.apply_full(u);
        let dx = self.grid.dx();
        let n = u.len();
        let mut acc = 0.5 * (u[0] * au[0] + u[n - 1] * au[n - 1]);
        for i in 1..n - 1 {
            acc += u[i] * au[i];
        }
        acc * dx
    }

    /// Assemble the row-replaced banded matrix with PDE rows
    /// `a I + b A` and exact boundary rows.
    pub fn assemble(&self, a: Complex, b: Complex) -> Banded {
        let n_nodes = self.grid.n_nodes();
        let mut m = Banded::zeros(n_nodes, KL, KU);
        for i in self.pde_rows() {
            m.add(i, i, a);
            self.a_row(i, |c, w| m.add(i, c, b * w));
        }
        for br in &self.boundary_rows {
            m.clear_row(br.row);
            for &(c, w) in &br.stencil {
                m.add(br.row, c, Complex::new(w, 0.0));
            }
        }
        m
    }

    /// Factored `sigma I - A` (row-replaced), for resolvent solves.
    pub fn shifted_system(&self, sigma: Complex) -> Result<BandedLu> {
        self.assemble(sigma, Complex::new(-1.0, 0.0))
            .factor()
            .map_err(|_| Error::SingularShift { shift: sigma })
    }

    /// Right-hand side for `(sigma I - A) u = f` with boundary data `h`:
    /// `f` on PDE rows, `h_k` on its lifting row.
    pub fn assemble_rhs(&self, f: &[Complex], h: [f64; 3]) -> Vec<Complex> {
        let mut rhs = vec![Complex::new(0.0, 0.0); self.grid.n_nodes()];
        for i in self.pde_rows() {
            rhs[i] = f[i];
        }
        for br in &self.boundary_rows {
            rhs[br.row] = Complex::new(h[br.datum], 0.0);
        }
        rhs
    }

    /// Residuals of the three discrete boundary rows applied to `u` minus
    /// the data `h`.
    pub fn boundary_residual(&self, u: &[f64], h: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for br in &self.boundary_rows {
            let mut acc = 0.0;
            for &(c, w) in &br.stencil {
                acc += w * u[c];
            }
            out[br.datum] = acc - h[br.datum];
        }
        out
    }

    /// Inverse iteration for the eigenvector nearest `shift`; returns the
    /// normalized real part (eigenfunctions of real eigenvalues are real).
    pub fn eigenvector(&self, shift: Complex, iters: usize) -> Result<Vec<f64>> {
        let lu = self.shifted_system(shift)?;
        let n = self.grid.n_nodes();
        let mut v: Vec<Complex> = (0..n)
            .map(|i| {
                let x = i as f64;
                Complex::new((0.7 * x).sin() + 0.3 * (1.3 * x).cos(), 0.0)
            })
            .collect();
        for _ in 0..iters {
            // solve (shift I - A) w = v with homogeneous boundary rows
            let mut rhs: Vec<Complex> = v.clone();
            for br in &self.boundary_rows {
                rhs[br.row] = Complex::new(0.0, 0.0);
            }
            lu.solve_in_place(&mut rhs);
            let nrm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm == 0.0 || !nrm.is_finite() {
                return Err(Error::SingularShift { shift });
            }
            for z in rhs.iter_mut() {
                *z /= nrm;
            }
            v = rhs;
        }
        // rotate the dominant component onto the real axis
        let pivot = v
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let phase = pivot / pivot.norm();
        Ok(v.iter().map(|z| (z / phase).re).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn cg_operator(n: usize) -> OperatorMatrix {
        OperatorMatrix::build(Grid::new(1.0, n).unwrap(), BcVariant::ColinGhidaglia).unwrap()
    }

    #[test]
    fn stencils_are_exact_at_their_degree() {
        let op = cg_operator(64);
        let g = op.grid().clone();
        let dx = g.dx();
        // p adjusted to the CG homogeneous conditions: p' = 3 (x - L)^2
        let u = g.sample(|x| x * x * x - 3.0 * x * x + 3.0 * x);
        let p1 = g.sample(|x| 3.0 * (x - 1.0) * (x - 1.0));
        let exact = g.sample(|x| -6.0 - 3.0 * (x - 1.0) * (x - 1.0));
        let au = op.apply_interior(&u);
        // the third-derivative stencils are exact on cubics; the centered
        // first derivative carries its dx^2 p''' / 6 truncation, so the
        // full row is exact only up to that term
        for i in op.pde_rows() {
            let d3_err = au[i] - exact[i]; // = -(D1 p - p')
            assert!(
                d3_err.abs() <= 1.001 * dx * dx + 1e-10,
                "row {i}: residual {d3_err}"
            );
            // isolate the D3 part: add the discrete D1 back
            let d1 = if i == 1 {
                (u[2] - u[0]) / (2.0 * dx)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * dx)
            };
            let d3_only = au[i] + d1; // = -D3 u, exact -p''' = -6
            assert!((d3_only + 6.0).abs() < 1e-8, "row {i}: D3 part {d3_only}");
            let _ = p1;
        }
        // full rows exact on quadratics (both stencil families)
        let q = g.sample(|x| x * x - 2.0 * x);
        let qex = g.sample(|x| -(2.0 * x - 2.0));
        let aq = op.apply_full(&q);
        for i in 0..g.n_nodes() {
            assert!((aq[i] - qex[i]).abs() < 1e-9, "node {i}");
        }
    }

    #[test]
    fn stationary_lifting_reproduces_the_left_datum() {
        let op = cg_operator(32);
        // solve A u = 0 with h = (1, 0, 0): row replacement makes u(0) = 1 exact
        let lu = op.shifted_system(Complex::new(0.0, 0.0)).unwrap();
        let f = vec![Complex::new(0.0, 0.0); op.grid().n_nodes()];
        let mut rhs = op.assemble_rhs(&f, [1.0, 0.0, 0.0]);
        lu.solve_in_place(&mut rhs);
        assert!((rhs[0].re - 1.0).abs() < 1e-12);
        let u: Vec<f64> = rhs.iter().map(|z| z.re).collect();
        let res = op.boundary_residual(&u, [1.0, 0.0, 0.0]);
        for r in res {
            assert!(r.abs() < 1e-10);
        }
    }

    #[test]
    fn dominant_shift_limit() {
        // sigma large real: solution of (sigma - A) u = f approaches f / sigma
        let op = cg_operator(48);
        let g = op.grid().clone();
        let sigma = Complex::new(1e6, 0.0);
        let lu = op.shifted_system(sigma).unwrap();
        let f: Vec<Complex> = g
            .sample(|x| (core::f64::consts::PI * x).sin())
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        let mut rhs = op.assemble_rhs(&f, [0.0; 3]);
        lu.solve_in_place(&mut rhs);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in op.pde_rows() {
            num += (rhs[i] * sigma - f[i]).norm_sqr();
            den += f[i].norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-3);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let op = cg_operator(16);
        let lu = op.shifted_system(Complex::new(2.0, 1.0)).unwrap();
        let mut rhs = vec![Complex::new(0.0, 0.0); op.grid().n_nodes()];
        lu.solve_in_place(&mut rhs);
        assert!(rhs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn dirichlet_rows_pin_both_ends() {
        let op =
            OperatorMatrix::build(Grid::new(1.0, 24).unwrap(), BcVariant::Dirichlet).unwrap();
        let lu = op.shifted_system(Complex::new(0.5, 0.0)).unwrap();
        let f = vec![Complex::new(0.0, 0.0); op.grid().n_nodes()];
        let mut rhs = op.assemble_rhs(&f, [0.25, 0.75, 0.0]);
        lu.solve_in_place(&mut rhs);
        assert!((rhs[0].re - 0.25).abs() < 1e-12);
        assert!((rhs[op.grid().n_nodes() - 1].re - 0.75).abs() < 1e-12);
    }
}
