//! Measured bilinear-estimate constant: the Rayleigh-style ratio
//! `||(u v)_x||_{L^1(0,T; L^2)} / (||u||_Y ||v||_Y)` over trajectory
//! pairs. A corpus of such ratios estimates the constant `C_T` of the
//! product estimate empirically.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::norms::{gradient, l2_norm, y_norm_of};

/// Ratio for one trajectory pair over `[0, T]`.
pub fn bilinear_measure(u: &Trajectory, v: &Trajectory, window: f64) -> Result<f64> {
    if (u.dt - v.dt).abs() > 1e-15 || u.grid != v.grid {
        return Err(Error::InvalidConfig(
            "trajectories must share the mesh".into(),
        ));
    }
    let steps = (window / u.dt).round() as usize;
    if steps > u.n_steps || steps > v.n_steps {
        return Err(Error::TrajectoryTooShort {
            needed: steps,
            got: u.n_steps.min(v.n_steps),
        });
    }
    let us = u
        .dense_states()
        .ok_or_else(|| Error::InvalidConfig("needs state_stride = 1".into()))?;
    let vs = v.dense_states().unwrap();
    let dx = u.grid.dx();
    let dt = u.dt;

    // || (u v)_x ||_{L^1 L^2}: trapezoid in time
    let mut l1l2 = 0.0;
    for k in 0..=steps {
        let prod: Vec<f64> = us[k].iter().zip(vs[k]).map(|(a, b)| a * b).collect();
        let d = gradient(&prod, dx);
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        l1l2 += w * l2_norm(&d, dx) * dt;
    }

    let yu = y_norm_of(
        &us[..=steps].iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
        dx,
        dt,
    );
    let yv = y_norm_of(
        &vs[..=steps].iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
        dx,
        dt,
    );
    if yu == 0.0 && yv == 0.0 {
        return Err(Error::EmptyFit);
    }
    if yu == 0.0 || yv == 0.0 {
        // one factor vanishes identically: the ratio is zero by convention
        return Ok(0.0);
    }
    Ok(l1l2 / (yu * yv))
}
