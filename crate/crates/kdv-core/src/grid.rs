//! Uniform grid on `[0, L]` and the two boundary-condition families.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Uniform grid with `n_interior` interior nodes: `x_i = i dx`,
/// `dx = L / (n_interior + 1)`, nodes `0 ..= n_interior + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    length: f64,
    n_interior: usize,
    dx: f64,
}

impl Grid {
    /// Minimum interior node count the widest stencil supports.
    pub const MIN_INTERIOR: usize = 8;

    pub fn new(length: f64, n_interior: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidConfig("interval length must be positive".into()));
        }
        if n_interior < Self::MIN_INTERIOR {
            return Err(Error::InvalidConfig(alloc::format!(
                "need at least {} interior nodes for the stencil widths, got {}",
                Self::MIN_INTERIOR,
                n_interior
            )));
        }
        Ok(Grid {
            length,
            n_interior,
            dx: length / (n_interior + 1) as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Interior node count `N`; the grid has `N + 2` nodes in total.
    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    /// Total node count including both endpoints.
    pub fn n_nodes(&self) -> usize {
        self.n_interior + 2
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Sample a function at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| f(self.node(i))).collect()
    }
}

/// Which triple of boundary rows closes the operator.
///
/// `ColinGhidaglia` is the wave-maker family `u(0) = h1`, `u_x(L) = h2`,
/// `u_xx(L) = h3`; `Dirichlet` is the comparison family `u(0) = h1`,
/// `u(L) = h2`, `u_x(L) = h3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcVariant {
    ColinGhidaglia,
    Dirichlet,
}

impl BcVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BcVariant::ColinGhidaglia => "cg",
            BcVariant::Dirichlet => "dirichlet",
        }
    }
}
