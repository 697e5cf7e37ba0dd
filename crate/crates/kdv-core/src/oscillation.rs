//! Period map for time-periodic boundary forcing: iterate the flow over
//! successive periods from rest, locate the fixed point (the forced
//! oscillation), and measure its local stability by fitting the return
//! rate of a perturbed trajectory.
//!
//! The iterates come from one continuous integration with snapshots at
//! period boundaries (restarting the multistep integrator each period
//! would re-excite undamped grid modes and pollute the distance floor).

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::evolve::{simulate_nonlinear, SimulateOptions, Trajectory};
use crate::fitting::linear_fit;
use crate::norms::l2_norm;
use crate::operator::OperatorMatrix;
use crate::signal::{BoundarySignal, SignalKind};

/// Converged period-map result.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMapResult {
    /// `||u(., (n+1) tau) - u(., n tau)||` per period.
    pub distances: Vec<f64>,
    /// Geometric ratio fitted on the distances above the convergence
    /// floor.
    pub contraction_ratio: f64,
    /// The converged periodic state `u(., 0 mod tau)`.
    pub fixed_point: Vec<f64>,
    /// `||u(., tau) - u(., 0)||` when re-integrating from the fixed point.
    pub periodic_residual: f64,
    /// Fitted exponential return rate of a perturbed trajectory.
    pub stability_rate: f64,
    /// Perturbation distances per period (diagnostics).
    pub return_distances: Vec<f64>,
    pub converged: bool,
}

/// Divergence report when the map fails to contract.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMapDivergence {
    pub distances: Vec<f64>,
    pub forcing_amplitude: f64,
}

pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Iterate the period map of the nonlinear flow under the periodic
/// signal; `perturbation` is added to the fixed point for the stability
/// fit (norm rescaled to 0.01).
pub fn period_map(
    op: &OperatorMatrix,
    signal_period: &BoundarySignal,
    max_iters: usize,
    perturbation: &[f64],
) -> core::result::Result<PeriodMapResult, PeriodMapError> {
    let tau = match signal_period.kind {
        SignalKind::Periodic { tau } => tau,
        _ => {
            return Err(PeriodMapError::Config(Error::InvalidConfig(
                "period map needs a periodic signal".into(),
            )))
        }
    };
    if max_iters < 10 {
        return Err(PeriodMapError::Config(Error::InvalidConfig(
            "max_iters must be at least 10".into(),
        )));
    }
    let dt = signal_period.dt;
    let steps_per = (tau / dt).round() as usize;
    let dx = op.grid().dx();
    let n_nodes = op.grid().n_nodes();

    // one long run with snapshots at period boundaries
    let total_steps = steps_per * max_iters;
    let signal = extend_periodic(signal_period, total_steps);
    let opts = SimulateOptions::new(dt, total_steps as f64 * dt).with_state_stride(steps_per);
    let phi = alloc::vec![0.0; n_nodes];
    let traj = run(op, &phi, &signal, opts)?;

    let snapshots: Vec<&[f64]> = (0..=max_iters)
        .filter_map(|k| traj.state_at(k * steps_per))
        .collect();
    let mut distances = Vec::new();
    let mut converged_at = None;
    for w in snapshots.windows(2) {
        let d = diff_norm(w[0], w[1], dx);
        distances.push(d);
        if d < CONVERGENCE_TOL {
            converged_at = Some(distances.len());
            break;
        }
    }
    let converged = converged_at.is_some();
    if !converged {
        // divergence check: distances rising for 5 consecutive periods
        let rising = distances
            .windows(6)
            .any(|w| w.windows(2).all(|p| p[1] > p[0]));
        if rising {
            let amp = signal_period
                .samples
                .iter()
                .map(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt())
                .fold(0.0, f64::max);
            return Err(PeriodMapError::Divergence(PeriodMapDivergence {
                distances,
                forcing_amplitude: amp,
            }));
        }
    }
    let n_done = converged_at.unwrap_or(distances.len());
    let fixed_point = snapshots[n_done].to_vec();

    // geometric ratio from the clean segment (above 100x the floor)
    let clean: Vec<(f64, f64)> = distances
        .iter()
        .enumerate()
        .take_while(|(_, d)| **d > 100.0 * CONVERGENCE_TOL)
        .map(|(n, d)| (n as f64, d.ln()))
        .collect();
    let contraction_ratio = if clean.len() >= 2 {
        let (slope, _, _) = linear_fit(&clean);
        slope.exp()
    } else if distances.len() >= 2 && distances[0] > 0.0 {
        distances[1] / distances[0]
    } else {
        0.0
    };

    // periodic residual: one more period from the fixed point
    let one = SimulateOptions::new(dt, tau).with_startup(0);
    let sig_one = extend_periodic(signal_period, steps_per);
    let check = run(op, &fixed_point, &sig_one, one)?;
    let periodic_residual = diff_norm(&fixed_point, check.final_state(), dx);

    // stability: perturb and fit the exponential return rate
    let mut pert = perturbation.to_vec();
    pert.resize(n_nodes, 0.0);
    pert[0] = 0.0;
    let pn = l2_norm(&pert, dx);
    if pn > 0.0 {
        for v in pert.iter_mut() {
            *v *= 0.01 / pn;
        }
    }
    let mut w0 = fixed_point.clone();
    for i in 0..n_nodes {
        w0[i] += pert[i];
    }
    let follow = 8.min(max_iters);
    let sig_follow = extend_periodic(signal_period, steps_per * follow);
    let opts_follow =
        SimulateOptions::new(dt, follow as f64 * tau).with_state_stride(steps_per);
    let ptraj = run(op, &w0, &sig_follow, opts_follow)?;
    let mut return_distances = Vec::new();
    for k in 0..=follow {
        if let Some(s) = ptraj.state_at(k * steps_per) {
            return_distances.push(diff_norm(s, &fixed_point, dx));
        }
    }
    let pts: Vec<(f64, f64)> = return_distances
        .iter()
        .enumerate()
        .take_while(|(_, d)| **d > 100.0 * CONVERGENCE_TOL)
        .map(|(k, d)| (k as f64 * tau, d.ln()))
        .collect();
    let stability_rate = if pts.len() >= 2 {
        let (slope, _, _) = linear_fit(&pts);
        -slope
    } else {
        f64::INFINITY // returned to the cycle within one period
    };

    Ok(PeriodMapResult {
        distances,
        contraction_ratio,
        fixed_point,
        periodic_residual,
        stability_rate,
        return_distances,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum PeriodMapError {
    Config(Error),
    Divergence(PeriodMapDivergence),
    Run(Error),
}

impl core::fmt::Display for PeriodMapError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PeriodMapError::Config(e) => write!(f, "period map config: {e}"),
            PeriodMapError::Divergence(d) => write!(
                f,
                "period map diverged at forcing amplitude {:.3e}",
                d.forcing_amplitude
            ),
            PeriodMapError::Run(e) => write!(f, "period map integration: {e}"),
        }
    }
}

impl core::error::Error for PeriodMapError {}

fn run(
    op: &OperatorMatrix,
    phi: &[f64],
    signal: &BoundarySignal,
    opts: SimulateOptions,
) -> core::result::Result<Trajectory, PeriodMapError> {
    simulate_nonlinear(op, phi, signal, opts).map_err(PeriodMapError::Run)
}

fn extend_periodic(base: &BoundarySignal, n_steps: usize) -> BoundarySignal {
    let period_samples = base.samples.len() - 1;
    let samples: Vec<[f64; 3]> = (0..=n_steps)
        .map(|n| base.samples[n % period_samples.max(1)])
        .collect();
    BoundarySignal {
        dt: base.dt,
        samples,
        kind: base.kind.clone(),
        derivative_samples: None,
    }
}

fn diff_norm(a: &[f64], b: &[f64], dx: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2_norm(&d, dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BcVariant, Grid};

    #[test]
    fn zero_forcing_fixes_the_origin() {
        let op =
            OperatorMatrix::build(Grid::new(1.0, 32).unwrap(), BcVariant::ColinGhidaglia).unwrap();
        let dt = 1.0 / 64.0;
        let sig = BoundarySignal {
            dt,
            samples: alloc::vec![[0.0; 3]; 65],
            kind: SignalKind::Periodic { tau: 1.0 },
            derivative_samples: None,
        };
        let pert = op.grid().sample(|x| (core::f64::consts::PI * x).sin());
        let r = period_map(&op, &sig, 12, &pert).unwrap();
        assert!(r.converged);
        assert_eq!(r.distances.len(), 1); // fixed after one iterate
        assert!(l2_norm(&r.fixed_point, op.grid().dx()) == 0.0);
    }
}
