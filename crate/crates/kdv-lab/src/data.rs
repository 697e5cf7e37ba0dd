//! Named data families: initial conditions and boundary signals, all
//! seeded from the config RNG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{BoundaryCfg, BoundaryKind, ExperimentConfig, InitialCfg, InitialFamily};
use crate::{LabError, Result};
use kdv_core::grid::Grid;
use kdv_core::norms::l2_norm;
use kdv_core::operator::OperatorMatrix;
use kdv_core::signal::BoundarySignal;
use kdv_core::spectrum::find_eigenvalues;
use kdv_core::Complex;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Build the initial state of a run, scaled to the configured amplitude
/// in `L^2` (except `Sine`, which uses the amplitude pointwise).
pub fn initial_state(
    cfg: &InitialCfg,
    grid: &Grid,
    op: &OperatorMatrix,
    seed: u64,
) -> Result<Vec<f64>> {
    let pi = std::f64::consts::PI;
    let l = grid.length();
    let mut u = match cfg.family {
        InitialFamily::Zero => vec![0.0; grid.n_nodes()],
        InitialFamily::Sine => grid.sample(|x| (cfg.mode as f64 * pi * x / l).sin()),
        InitialFamily::LiftedSine => grid.sample(|x| (pi * x / l).sin() + pi * x / l),
        InitialFamily::Eigenmode => {
            let set = find_eigenvalues(l, cfg.mode)?;
            let lam = set
                .records
                .get(cfg.mode - 1)
                .ok_or_else(|| LabError::Numerical("eigenvalue search came up short".into()))?
                .lambda;
            op.eigenvector(lam + Complex::new(0.05, 0.0), 40)?
        }
        InitialFamily::RandomSmooth => {
            let mut rng = rng_for(seed, 1);
            let coeffs: Vec<f64> = (0..cfg.cutoff.max(1))
                .map(|m| rng.gen_range(-1.0..1.0) / ((m + 1) * (m + 1)) as f64)
                .collect();
            grid.sample(|x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * ((m + 1) as f64 * pi * x / l).sin())
                    .sum()
            })
        }
        InitialFamily::RandomRough => {
            let mut rng = rng_for(seed, 2);
            let mut v: Vec<f64> = (0..grid.n_nodes())
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            v[0] = 0.0;
            v
        }
    };
    if matches!(cfg.family, InitialFamily::Zero) {
        return Ok(u);
    }
    if matches!(cfg.family, InitialFamily::Sine) {
        for v in u.iter_mut() {
            *v *= cfg.amplitude;
        }
        return Ok(u);
    }
    let nrm = l2_norm(&u, grid.dx());
    if nrm == 0.0 {
        return Err(LabError::Numerical("degenerate initial state".into()));
    }
    for v in u.iter_mut() {
        *v *= cfg.amplitude / nrm;
    }
    Ok(u)
}

/// Build the boundary signal for a run of `n_steps` steps of size `dt`.
pub fn boundary_signal(cfg: &BoundaryCfg, dt: f64, n_steps: usize) -> BoundarySignal {
    let pi = std::f64::consts::PI;
    let ch = cfg.channel - 1;
    match cfg.kind {
        BoundaryKind::Zero => BoundarySignal::zero(dt, n_steps),
        BoundaryKind::Periodic => {
            let tau = cfg.tau;
            let amp = cfg.amplitude;
            BoundarySignal::periodic(dt, n_steps, tau, move |t| {
                let mut h = [0.0; 3];
                h[ch] = amp * (2.0 * pi * t / tau).sin();
                h
            })
        }
        BoundaryKind::Decaying => {
            let amp = cfg.amplitude;
            BoundarySignal::decaying(dt, n_steps, cfg.nu, move |t| {
                let mut h = [0.0; 3];
                h[ch] = amp * (2.0 * pi * t).sin();
                h
            })
        }
    }
}

/// Smooth random field for period-map perturbations.
pub fn smooth_random_field(grid: &Grid, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, 3);
    let pi = std::f64::consts::PI;
    let l = grid.length();
    let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    grid.sample(|x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * ((m + 1) as f64 * pi * x / l).sin())
            .sum()
    })
}

/// Sampled coefficient field `a(x, t)` for the variable-coefficient flow:
/// a standing profile of the configured amplitude.
pub fn coefficient_field(
    grid: &Grid,
    amplitude: f64,
    n_steps: usize,
) -> Vec<Vec<f64>> {
    let pi = std::f64::consts::PI;
    let l = grid.length();
    let profile = grid.sample(|x| amplitude * (pi * x / l).sin());
    (0..=n_steps).map(|_| profile.clone()).collect()
}

/// Build grid + operator from a config.
pub fn build_operator(cfg: &ExperimentConfig) -> Result<(Grid, OperatorMatrix)> {
    let grid = Grid::new(cfg.grid.l, cfg.grid.n)?;
    let op = OperatorMatrix::build(grid.clone(), cfg.bc.variant())?;
    Ok((grid, op))
}
