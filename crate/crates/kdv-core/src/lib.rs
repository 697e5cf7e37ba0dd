//! Numerical laboratory for the KdV equation posed on a finite interval
//! with a wave-maker boundary condition at the left end and free-end
//! conditions at the right:
//!
//! ```text
//! u_t + u_x + u_xxx + u u_x = 0        on (0, L)
//! u(0,t) = h1(t), u_x(L,t) = h2(t), u_xx(L,t) = h3(t)
//! ```
//!
//! The crate provides, at desk scale:
//!
//! * exact spectral objects of the linear operator `A g = -g''' - g'`
//!   (characteristic determinant, eigenvalues, Green's function, resolvent
//!   norm profiles) — see [`cubic`], [`chardet`], [`spectrum`], [`green`],
//!   [`resolvent`];
//! * a second-order finite-difference discretization with banded solves
//!   and nonhomogeneous boundary lifting — see [`grid`], [`operator`],
//!   [`banded`];
//! * Crank–Nicolson / IMEX time integration of the linear, variable
//!   coefficient and full nonlinear flows, with energy audits and a period
//!   map for forced oscillations — see [`evolve`], [`audit`],
//!   [`oscillation`];
//! * post-processing: decay fits, the iteration-bound checker, time
//!   slicing contraction audits and bilinear-estimate measurements — see
//!   [`fitting`], [`iteration`], [`contraction`], [`bilinear`].
//!
//! The crate is `no_std` (with `alloc`); all floating point math goes
//! through `num-traits`/`libm`. Everything here is a pure function of its
//! inputs and safe to call from multiple threads.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod banded;
pub mod bilinear;
pub mod chardet;
pub mod contraction;
pub mod cubic;
pub mod error;
pub mod evolve;
pub mod fitting;
pub mod green;
pub mod grid;
pub mod iteration;
pub mod norms;
pub mod operator;
pub mod oscillation;
pub mod resolvent;
pub mod scaled;
pub mod signal;
pub mod spectrum;

pub use chardet::{char_det, ScaledDet};
pub use cubic::{cubic_roots, CubicRoots};
pub use error::Error;
pub use green::{green_eval, resolvent_apply, GreenCoefficients};
pub use grid::{BcVariant, Grid};
pub use operator::OperatorMatrix;
pub use resolvent::{resolvent_norm_profile, ResolventProfile};
pub use spectrum::{find_eigenvalues, EigenvalueRecord, EigenvalueSet};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex<f64>;
