//! Evolution checks: decay rates against the spectrum, smoothing, energy
//! audits, manufactured solutions, the time-derivative system, and the
//! variable-coefficient flow.

use kdv_core::audit::{
    dissipativity_residuals, energy_audit, recompute_l2, smooth121, verify_time_derivative_system,
};
use kdv_core::evolve::{
    simulate_linear, simulate_linear_forced, simulate_nonlinear, simulate_nonlinear_forced,
    simulate_varcoef, y_norm_windows, SimulateOptions,
};
use kdv_core::fitting::{fit_decay, fit_decay_with_floor};
use kdv_core::grid::{BcVariant, Grid};
use kdv_core::norms::{h1_norm, l2_norm};
use kdv_core::operator::OperatorMatrix;
use kdv_core::signal::BoundarySignal;
use kdv_core::spectrum::find_eigenvalues;
use kdv_core::Complex;
use kdv_core::error::Error;

const PI: f64 = std::f64::consts::PI;

fn cg_op(n: usize) -> OperatorMatrix {
    OperatorMatrix::build(Grid::new(1.0, n).unwrap(), BcVariant::ColinGhidaglia).unwrap()
}

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn eigenmode_decays_at_the_spectral_rate() {
    // rate |Re lambda_1| within 5 percent (lambda_1 = -6.6802 for L = 1)
    let op = cg_op(256);
    let lam1 = find_eigenvalues(1.0, 1).unwrap().records[0].lambda;
    let phi = op.eigenvector(lam1 + Complex::new(0.05, 0.0), 40).unwrap();
    let opts = SimulateOptions::new(1.0 / 257.0, 1.5).with_state_stride(100000);
    let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
    let t = simulate_linear(&op, &phi, &signal, opts).unwrap();
    let series: Vec<(f64, f64)> = t
        .l2_series
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 * t.dt, *v))
        .collect();
    let fit = fit_decay(&series, (0.05, 1.5)).unwrap();
    let rel = (fit.rate - lam1.re.abs()).abs() / lam1.re.abs();
    assert!(rel < 0.05, "rate {} vs {}", fit.rate, lam1.re.abs());
    assert!(fit.r_squared > 0.999);
}

#[test]
fn rough_data_smooths_in_h1() {
    // random sign data: H1 norm at t = 0.5 finite and below t = 0.1
    let op = cg_op(256);
    let mut rnd = lcg(17);
    let mut phi: Vec<f64> = (0..op.grid().n_nodes())
        .map(|_| if rnd() > 0.5 { 1.0 } else { -1.0 })
        .collect();
    phi[0] = 0.0;
    let opts = SimulateOptions::new(1e-4, 0.5).with_startup(2).with_state_stride(1000);
    let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
    let t = simulate_linear(&op, &phi, &signal, opts).unwrap();
    let dx = op.grid().dx();
    let u01 = t.state_at(1000).unwrap();
    let u05 = t.state_at(5000).unwrap();
    let h01 = h1_norm(u01, dx);
    let h05 = h1_norm(u05, dx);
    assert!(h05.is_finite() && h01.is_finite());
    assert!(h05 < h01, "H1(0.5) = {h05} vs H1(0.1) = {h01}");
}

#[test]
fn energy_audit_orders_for_both_families() {
    // derived identities shrink at observed order >= 1.8 under joint
    // (dx, dt) refinement, measured past the initial compatibility layer
    for bc in [BcVariant::ColinGhidaglia, BcVariant::Dirichlet] {
        let mut residuals = Vec::new();
        for n in [127usize, 255, 511] {
            let grid = Grid::new(1.0, n).unwrap();
            let op = OperatorMatrix::build(grid.clone(), bc).unwrap();
            let phi: Vec<f64> = grid.sample(|x| match bc {
                BcVariant::ColinGhidaglia => 8.0 * (PI * x).sin() * x * (1.0 - x).powi(4),
                BcVariant::Dirichlet => 8.0 * (PI * x).sin().powi(2) * (1.0 - x),
            });
            let opts = SimulateOptions::new(0.5 / (n as f64 + 1.0), 0.5)
                .with_startup(0)
                .with_state_stride(100000);
            let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
            let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
            let audit = energy_audit(&t, 0);
            residuals.push(audit.max_residual_in(0.1, 0.4));
        }
        let overall = (residuals[0] / residuals[2]).log2() / 2.0;
        assert!(
            overall >= 1.8,
            "{bc:?}: order {overall:.2} from {residuals:?}"
        );
    }
}

#[test]
fn dirichlet_l2_is_nonincreasing() {
    let grid = Grid::new(1.0, 128).unwrap();
    let op = OperatorMatrix::build(grid.clone(), BcVariant::Dirichlet).unwrap();
    let phi = grid.sample(|x| (PI * x).sin() * (1.0 - x));
    let nrm = l2_norm(&phi, grid.dx());
    let phi: Vec<f64> = phi.iter().map(|v| v / nrm).collect();
    let opts = SimulateOptions::new(0.25 / 129.0, 2.0).with_state_stride(100000);
    let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
    let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
    let dx2 = grid.dx() * grid.dx();
    let dt2 = opts.dt * opts.dt;
    for w in t.l2_series.windows(2) {
        assert!(w[1] * w[1] <= w[0] * w[0] + 10.0 * (dx2 + dt2));
    }
}

#[test]
fn mms_linear_and_nonlinear_converge_at_second_order() {
    // u_exact = e^{-t} (sin(pi x) + pi x) satisfies the homogeneous
    // wave-maker conditions; the forcing it implies drives the solvers
    let w = |x: f64| (PI * x).sin() + PI * x;
    let wp = |x: f64| PI * (PI * x).cos() + PI;
    let wppp = |x: f64| -PI * PI * PI * (PI * x).cos();
    for nonlinear in [false, true] {
        let mut errs = Vec::new();
        for n in [63usize, 127, 255] {
            let grid = Grid::new(1.0, n).unwrap();
            let op = OperatorMatrix::build(grid.clone(), BcVariant::ColinGhidaglia).unwrap();
            let phi = grid.sample(w);
            let opts = SimulateOptions::new(0.5 / (n as f64 + 1.0), 0.5)
                .with_startup(0)
                .with_state_stride(100000);
            let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
            let forcing = move |x: f64, t: f64| {
                let lin = (-t).exp() * (-w(x) + wp(x) + wppp(x));
                if nonlinear {
                    lin + (-2.0 * t).exp() * w(x) * wp(x)
                } else {
                    lin
                }
            };
            let traj = if nonlinear {
                simulate_nonlinear_forced(&op, &phi, &signal, opts, &forcing).unwrap()
            } else {
                simulate_linear_forced(&op, &phi, &signal, opts, &forcing).unwrap()
            };
            let u = traj.final_state();
            let exact = grid.sample(|x| (-0.5f64).exp() * w(x));
            let diff: Vec<f64> = u.iter().zip(&exact).map(|(a, b)| a - b).collect();
            errs.push(l2_norm(&diff, grid.dx()) / l2_norm(&exact, grid.dx()));
        }
        let overall = (errs[0] / errs[2]).log2() / 2.0;
        assert!(
            overall >= 1.8,
            "nonlinear={nonlinear}: order {overall:.2} from {errs:?}"
        );
    }
}

#[test]
fn time_derivative_system_residuals_shrink() {
    // v = u_t solves the linearized equation; residuals below 1e-2 and
    // shrinking at order >= 1.8 (window past the compatibility layer,
    // startup damping on)
    let mut eqs = Vec::new();
    let mut mms = Vec::new();
    for n in [127usize, 255, 511] {
        let grid = Grid::new(1.0, n).unwrap();
        let op = OperatorMatrix::build(grid.clone(), BcVariant::ColinGhidaglia).unwrap();
        let phi = grid.sample(|x| 5.0 * x.powi(4) * (1.0 - x).powi(4));
        let opts = SimulateOptions::new(0.25 / (n as f64 + 1.0), 0.35).with_startup(4);
        let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
        let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
        let rep = verify_time_derivative_system(&t, &op, &phi, (0.1, 0.3), 4).unwrap();
        eqs.push(rep.max_equation_residual());
        mms.push(rep.max_recovery_mismatch());
    }
    assert!(eqs.iter().all(|&r| r < 1e-2), "{eqs:?}");
    assert!(mms.iter().all(|&r| r < 1e-2), "{mms:?}");
    let oe = (eqs[0] / eqs[2]).log2() / 2.0;
    let om = (mms[0] / mms[2]).log2() / 2.0;
    assert!(oe >= 1.8 && om >= 1.8, "orders {oe:.2} {om:.2}: {eqs:?} {mms:?}");
}

#[test]
fn v0_matches_phi_star_under_dt_refinement() {
    // phi*(x) = -phi' - phi phi' - phi''' built with the same stencils;
    // left-compatible data, the right-corner layer excluded by the
    // dt-aware margin inside the report
    let n = 255usize;
    let grid = Grid::new(1.0, n).unwrap();
    let op = OperatorMatrix::build(grid.clone(), BcVariant::ColinGhidaglia).unwrap();
    let phi = grid.sample(|x| 5.0 * x.powi(4) * (1.0 - x).powi(4));
    let mut errs = Vec::new();
    for dt in [1e-5, 1e-6] {
        let opts = SimulateOptions::new(dt, 10.0 * dt).with_startup(0);
        let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
        let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
        let rep = verify_time_derivative_system(&t, &op, &phi, (dt, 4.0 * dt), 2).unwrap();
        errs.push(rep.v0_vs_phi_star);
    }
    assert!(errs[0] < 1e-2, "{errs:?}");
    assert!(errs[1] < errs[0], "{errs:?}");
}

#[test]
fn dissipativity_identities_converge() {
    // paper identity on the g(L) = 0 subfamily; derived identity (with
    // the g(L)^2/2 term) on the general domain family; both at order 2
    let mut paper_fam = Vec::new();
    let mut derived_gen = Vec::new();
    for n in [63usize, 127, 255] {
        let grid = Grid::new(1.0, n).unwrap();
        let op = OperatorMatrix::build(grid.clone(), BcVariant::ColinGhidaglia).unwrap();
        let mut rnd = lcg(4242);
        let mut worst_paper = 0.0f64;
        let mut worst_derived = 0.0f64;
        for _ in 0..20 {
            let c: Vec<f64> = (0..4).map(|_| 2.0 * rnd() - 1.0).collect();
            let raw = |x: f64| {
                c[0] * (PI * x).sin()
                    + c[1] * (2.0 * PI * x).cos()
                    + c[2] * x * x
                    + c[3] * (3.0 * x).sin()
            };
            let rawp = |x: f64| {
                c[0] * PI * (PI * x).cos() - c[1] * 2.0 * PI * (2.0 * PI * x).sin()
                    + 2.0 * c[2] * x
                    + 3.0 * c[3] * (3.0 * x).cos()
            };
            let rawpp = |x: f64| {
                -c[0] * PI * PI * (PI * x).sin() - c[1] * 4.0 * PI * PI * (2.0 * PI * x).cos()
                    + 2.0 * c[2]
                    - 9.0 * c[3] * (3.0 * x).sin()
            };
            // cubic correction p with p(0)=raw(0), p'(1)=raw'(1), p''(1)=raw''(1)
            // (and p(1)=raw(1) for the four-condition family)
            let (a3, a2, a1, a0);
            {
                // general family: quadratic correction (domain conditions only)
                let b2 = 0.5 * rawpp(1.0);
                let b1 = rawp(1.0) - 2.0 * b2;
                let b0 = raw(0.0);
                let g = |x: f64| raw(x) - (b0 + b1 * x + b2 * x * x);
                let u = op.grid().sample(g);
                let nrm = l2_norm(&u, op.grid().dx());
                let u: Vec<f64> = u.iter().map(|v| v / nrm).collect();
                let (_, derived) = dissipativity_residuals(&op, &u);
                worst_derived = worst_derived.max(derived.abs());
            }
            {
                // four conditions: cubic correction, paper identity exact
                // p(0)=r(0), p(1)=r(1), p'(1)=r'(1), p''(1)=r''(1)
                a0 = raw(0.0);
                // solve for a1, a2, a3 from conditions at x = 1
                // p = a0 + a1 x + a2 x^2 + a3 x^3
                // p(1) = a0+a1+a2+a3 ; p'(1) = a1+2a2+3a3 ; p''(1) = 2a2+6a3
                let r1 = raw(1.0) - a0;
                let r2 = rawp(1.0);
                let r3 = rawpp(1.0);
                // [1 1 1][a1 a2 a3]^T = r1 ; [1 2 3] = r2 ; [0 2 6] = r3
                a3 = r1 - r2 + r3 / 2.0;
                a2 = r3 / 2.0 - 3.0 * a3;
                a1 = r2 - r3 + 3.0 * a3;
                let g = |x: f64| raw(x) - (a0 + a1 * x + a2 * x * x + a3 * x * x * x);
                let u = op.grid().sample(g);
                let nrm = l2_norm(&u, op.grid().dx());
                if nrm < 1e-12 {
                    continue;
                }
                let u: Vec<f64> = u.iter().map(|v| v / nrm).collect();
                let (paper, _) = dissipativity_residuals(&op, &u);
                worst_paper = worst_paper.max(paper.abs());
                // discrete dissipativity: nonpositive up to truncation,
                // asserted where the truncation constant is small enough
                if n >= 255 {
                    assert!(op.quadratic_form(&u) <= 1e-2);
                }
            }
        }
        paper_fam.push(worst_paper);
        derived_gen.push(worst_derived);
    }
    let op_paper = (paper_fam[0] / paper_fam[2]).log2() / 2.0;
    let op_derived = (derived_gen[0] / derived_gen[2]).log2() / 2.0;
    assert!(op_paper >= 1.8, "paper-family order {op_paper:.2}: {paper_fam:?}");
    assert!(
        op_derived >= 1.8,
        "derived-identity order {op_derived:.2}: {derived_gen:?}"
    );
}

#[test]
fn varcoef_small_coefficient_decays() {
    let op = cg_op(128);
    let grid = op.grid().clone();
    let phi = grid.sample(|x| (PI * x).sin() + PI * x);
    let opts = SimulateOptions::new(0.25 / 129.0, 6.0).with_state_stride(100000);
    let n_steps = opts.n_steps();
    let a: Vec<Vec<f64>> = (0..=n_steps)
        .map(|_| grid.sample(|x| 0.05 * (PI * x).sin()))
        .collect();
    let signal = BoundarySignal::zero(opts.dt, n_steps);
    let t = simulate_varcoef(&op, &phi, &a, &signal, opts).unwrap();
    let series: Vec<(f64, f64)> = t
        .l2_series
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 * t.dt, *v))
        .collect();
    let fit = fit_decay(&series, (0.2, 2.0)).unwrap();
    assert!(fit.rate > 0.0, "rate {}", fit.rate);
}

#[test]
fn varcoef_cfl_guard_trips() {
    let op = cg_op(64);
    let grid = op.grid().clone();
    let phi = grid.sample(|x| (PI * x).sin());
    let opts = SimulateOptions::new(0.05, 0.5);
    let n_steps = opts.n_steps();
    // |a| dt / dx = 100 * 0.05 * 65 >> 0.5
    let a: Vec<Vec<f64>> = (0..=n_steps).map(|_| vec![100.0; grid.n_nodes()]).collect();
    let signal = BoundarySignal::zero(opts.dt, n_steps);
    match simulate_varcoef(&op, &phi, &a, &signal, opts) {
        Err(Error::CflViolation { ratio }) => assert!(ratio > 0.5),
        other => panic!("expected CFL violation, got {other:?}"),
    }
}

#[test]
fn decaying_forcing_sets_the_decay_rate() {
    // h1 = 0.01 sin(2 pi t) e^{-nu t}, nu = 0.2: fitted solution decay
    // rate >= min(linear rate, nu) - 0.05
    let op = cg_op(128);
    let nu = 0.2;
    let opts = SimulateOptions::new(0.25 / 129.0, 30.0).with_state_stride(100000);
    let n_steps = opts.n_steps();
    let signal = BoundarySignal::decaying(opts.dt, n_steps, nu, |t| {
        [0.01 * (2.0 * PI * t).sin(), 0.0, 0.0]
    });
    let phi = vec![0.0; op.grid().n_nodes()];
    let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
    let series: Vec<(f64, f64)> = t
        .l2_series
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 * t.dt, *v))
        .collect();
    let fit = fit_decay(&series, (4.0, 30.0)).unwrap();
    assert!(
        fit.rate >= nu.min(6.68) - 0.05,
        "rate {} vs threshold {}",
        fit.rate,
        nu - 0.05
    );
}

#[test]
fn boundary_forced_linear_flow_stays_bounded() {
    // phi = 0, h = (sin t, 0, 0): windowed Y norms bounded uniformly,
    // bound proportional to the windowed boundary norm
    let op = cg_op(96);
    let opts = SimulateOptions::new(1.0 / 97.0, 12.0);
    let n_steps = opts.n_steps();
    let signal = BoundarySignal::from_fn(opts.dt, n_steps, |t| [t.sin(), 0.0, 0.0]);
    let phi = vec![0.0; op.grid().n_nodes()];
    let t = simulate_linear(&op, &phi, &signal, opts).unwrap();
    let reports = y_norm_windows(&t, 1.0).unwrap();
    let y_max = reports.iter().map(|r| r.y_norm).fold(0.0, f64::max);
    let b_max = reports.iter().map(|r| r.boundary_b_norm).fold(0.0, f64::max);
    assert!(y_max.is_finite() && y_max > 0.0);
    // fitted C_T: the ratio stays modest (empirical constant, recorded)
    let c_t = y_max / b_max;
    assert!(c_t < 20.0, "C_T = {c_t}");
    assert!(reports.iter().all(|r| r.b_norm_is_surrogate));
}

#[test]
fn y_norm_windows_on_separable_data() {
    // u(x, t) = e^{-t} w(x): per-window sup equals e^{-t_start} ||w||
    let op = cg_op(64);
    let grid = op.grid().clone();
    let w: Vec<f64> = grid.sample(|x| (PI * x).sin());
    let dt = 0.01;
    let n_steps = 100;
    // assemble a synthetic trajectory through the public simulate API by
    // forcing the equation so that u stays separable is overkill here;
    // instead check the window reduction on a hand-built state sequence
    let dx = grid.dx();
    let states: Vec<Vec<f64>> = (0..=n_steps)
        .map(|k| {
            let decay = (-(k as f64) * dt).exp();
            w.iter().map(|v| v * decay).collect()
        })
        .collect();
    let wnorm = l2_norm(&w, dx);
    // reuse the windowed sup logic indirectly: sup over window [t, t+T]
    // of the exponential is attained at the left endpoint
    let t_window = 0.25;
    let wsteps = (t_window / dt).round() as usize;
    for start in [0usize, 20, 50] {
        let sup = states[start..=start + wsteps]
            .iter()
            .map(|u| l2_norm(u, dx))
            .fold(0.0, f64::max);
        let expect = (-(start as f64) * dt).exp() * wnorm;
        assert!((sup - expect).abs() < 1e-10 * expect);
    }
}

#[test]
fn linearization_consistency_in_epsilon() {
    // nonlinear flow with data eps*phi agrees with eps * linear flow to
    // O(eps^2) at t = 1
    let op = cg_op(128);
    let grid = op.grid().clone();
    let phi = grid.sample(|x| (PI * x).sin() + PI * x);
    let opts = SimulateOptions::new(0.25 / 129.0, 1.0).with_state_stride(100000);
    let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
    let linear = simulate_linear(&op, &phi, &signal, opts).unwrap();
    let dx = grid.dx();
    let mut prev_gap = f64::INFINITY;
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let scaled: Vec<f64> = phi.iter().map(|v| eps * v).collect();
        let nl = simulate_nonlinear(&op, &scaled, &signal, opts).unwrap();
        let lf = linear.final_state();
        let nf = nl.final_state();
        let diff: Vec<f64> = nf.iter().zip(lf).map(|(a, b)| a / eps - b).collect();
        let gap = l2_norm(&diff, dx);
        assert!(gap < 10.0 * eps, "eps {eps}: gap {gap}");
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
}

#[test]
fn l2_series_is_recomputable_from_stored_states() {
    let op = cg_op(64);
    let grid = op.grid().clone();
    let phi = grid.sample(|x| 0.3 * (2.0 * PI * x).sin() * x);
    let opts = SimulateOptions::new(0.002, 0.1).with_state_stride(10);
    let signal = BoundarySignal::zero(opts.dt, opts.n_steps());
    let t = simulate_nonlinear(&op, &phi, &signal, opts).unwrap();
    for (step, _) in &t.stored {
        let rec = recompute_l2(&t, *step).unwrap();
        assert!((rec - t.l2_series[*step]).abs() <= 1e-14 * rec.max(1.0));
    }
}

#[test]
fn smoother_annihilates_the_checkerboard() {
    let u: Vec<f64> = (0..33).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let s = smooth121(&u);
    for v in &s[1..32] {
        assert!(v.abs() < 1e-15);
    }
}
