//! Experiment configuration: structured TOML with unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::{LabError, Result};
use kdv_core::grid::BcVariant;

/// The experiments the CLI can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Resolvent,
    SimulateLinear,
    SimulateVarcoef,
    SimulateNonlinear,
    EnergyAudit,
    DecayFit,
    ForcedOscillation,
    IterationCheck,
    ContractionAudit,
    MmsConvergence,
    Sweep,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Resolvent => "resolvent",
            Experiment::SimulateLinear => "simulate-linear",
            Experiment::SimulateVarcoef => "simulate-varcoef",
            Experiment::SimulateNonlinear => "simulate-nonlinear",
            Experiment::EnergyAudit => "energy-audit",
            Experiment::DecayFit => "decay-fit",
            Experiment::ForcedOscillation => "forced-oscillation",
            Experiment::IterationCheck => "iteration-check",
            Experiment::ContractionAudit => "contraction-audit",
            Experiment::MmsConvergence => "mms-convergence",
            Experiment::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub l: f64,
    pub n: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg { l: 1.0, n: 256 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeCfg {
    /// Step size; 0 selects the default `0.25 dx` (nonlinear) / `dx`
    /// (linear) rule.
    #[serde(default)]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_window")]
    pub window_t: f64,
}

fn default_window() -> f64 {
    1.0
}

impl Default for TimeCfg {
    fn default() -> Self {
        TimeCfg {
            dt: 0.0,
            t_end: 10.0,
            window_t: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcCfg {
    Cg,
    Dirichlet,
}

impl Default for BcCfg {
    fn default() -> Self {
        BcCfg::Cg
    }
}

impl BcCfg {
    pub fn variant(&self) -> BcVariant {
        match self {
            BcCfg::Cg => BcVariant::ColinGhidaglia,
            BcCfg::Dirichlet => BcVariant::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCfg {
    /// Backward-Euler startup pairs.
    #[serde(default = "default_startup")]
    pub startup_pairs: usize,
    /// Full-state storage stride; 0 = automatic per experiment.
    #[serde(default)]
    pub state_stride: usize,
    #[serde(default = "default_guard")]
    pub blowup_guard: f64,
}

fn default_startup() -> usize {
    2
}

fn default_guard() -> f64 {
    1e6
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg {
            startup_pairs: 2,
            state_stride: 0,
            blowup_guard: 1e6,
        }
    }
}

/// Named initial-condition families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialFamily {
    Zero,
    /// Discrete eigenvector of mode `mode`.
    Eigenmode,
    /// `sin(mode pi x / L)`.
    Sine,
    /// Seeded low-pass Fourier sum up to `cutoff`.
    RandomSmooth,
    /// Seeded random signs per node.
    RandomRough,
    /// The lifted profile `sin(pi x / L) + pi x / L` (wave-maker
    /// compatible).
    LiftedSine,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    pub family: InitialFamily,
    #[serde(default = "default_amp")]
    pub amplitude: f64,
    #[serde(default = "default_mode")]
    pub mode: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
}

fn default_amp() -> f64 {
    1.0
}
fn default_mode() -> usize {
    1
}
fn default_cutoff() -> usize {
    8
}

impl Default for InitialCfg {
    fn default() -> Self {
        InitialCfg {
            family: InitialFamily::Zero,
            amplitude: 1.0,
            mode: 1,
            cutoff: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Zero,
    /// `amplitude * sin(2 pi t / tau)` on the selected channel, periodic.
    Periodic,
    /// `amplitude * sin(2 pi t) * exp(-nu t)` on the selected channel.
    Decaying,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryCfg {
    pub kind: BoundaryKind,
    #[serde(default = "default_amp")]
    pub amplitude: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Which datum carries the signal: 1 -> h1, 2 -> h2, 3 -> h3.
    #[serde(default = "default_channel")]
    pub channel: usize,
}

fn default_nu() -> f64 {
    0.2
}
fn default_tau() -> f64 {
    1.0
}
fn default_channel() -> usize {
    1
}

impl Default for BoundaryCfg {
    fn default() -> Self {
        BoundaryCfg {
            kind: BoundaryKind::Zero,
            amplitude: 0.0,
            nu: 0.2,
            tau: 1.0,
            channel: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumCfg {
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    20
}

impl Default for SpectrumCfg {
    fn default() -> Self {
        SpectrumCfg { count: 20 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventCfg {
    #[serde(default = "default_omega_min")]
    pub omega_min: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_omega_min() -> f64 {
    1e2
}
fn default_omega_max() -> f64 {
    1e5
}
fn default_samples() -> usize {
    24
}

impl Default for ResolventCfg {
    fn default() -> Self {
        ResolventCfg {
            omega_min: 1e2,
            omega_max: 1e5,
            samples: 24,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationCfg {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_bstar")]
    pub b_star: f64,
    #[serde(default = "default_y0")]
    pub y0: f64,
    #[serde(default = "default_nmax")]
    pub n_max: usize,
    #[serde(default)]
    pub geometric: bool,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_gamma() -> f64 {
    0.5
}
fn default_bstar() -> f64 {
    0.1
}
fn default_y0() -> f64 {
    1.0
}
fn default_nmax() -> usize {
    200
}
fn default_delta() -> f64 {
    0.25
}

impl Default for IterationCfg {
    fn default() -> Self {
        IterationCfg {
            gamma: 0.5,
            beta: 0.0,
            b_star: 0.1,
            y0: 1.0,
            n_max: 200,
            geometric: false,
            delta: 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsCfg {
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub nonlinear: bool,
}

fn default_levels() -> Vec<usize> {
    vec![63, 127, 255]
}

impl Default for MmsCfg {
    fn default() -> Self {
        MmsCfg {
            levels: default_levels(),
            nonlinear: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationCfg {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_max_iters() -> usize {
    30
}

impl Default for OscillationCfg {
    fn default() -> Self {
        OscillationCfg { max_iters: 30 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    /// Dotted path of the swept parameter, e.g. `initial.amplitude`.
    pub parameter: String,
    pub values: Vec<f64>,
    /// The experiment each child runs.
    pub child: Experiment,
    #[serde(default = "default_cap")]
    pub max_runs: usize,
}

fn default_cap() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditCfg {
    #[serde(default = "default_audit_window")]
    pub window: [f64; 2],
}

fn default_audit_window() -> [f64; 2] {
    [0.1, 0.4]
}

impl Default for AuditCfg {
    fn default() -> Self {
        AuditCfg {
            window: default_audit_window(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitCfg {
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    1e-12
}

impl Default for FitCfg {
    fn default() -> Self {
        FitCfg {
            window: None,
            floor: 1e-12,
        }
    }
}

/// One experiment's full configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; the CLI subcommand takes precedence.
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub grid: GridCfg,
    #[serde(default)]
    pub time: TimeCfg,
    #[serde(default)]
    pub bc: BcCfg,
    #[serde(default)]
    pub solver: SolverCfg,
    #[serde(default)]
    pub initial: InitialCfg,
    #[serde(default)]
    pub boundary: BoundaryCfg,
    #[serde(default)]
    pub spectrum: SpectrumCfg,
    #[serde(default)]
    pub resolvent: ResolventCfg,
    #[serde(default)]
    pub iteration: IterationCfg,
    #[serde(default)]
    pub mms: MmsCfg,
    #[serde(default)]
    pub oscillation: OscillationCfg,
    #[serde(default)]
    pub audit: AuditCfg,
    #[serde(default)]
    pub fit: FitCfg,
    #[serde(default)]
    pub sweep: Option<SweepCfg>,
    /// Coefficient amplitude for the variable-coefficient flow.
    #[serde(default = "default_coef_amp")]
    pub coefficient_amplitude: f64,
}

fn default_seed() -> u64 {
    0
}
fn default_coef_amp() -> f64 {
    0.05
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config parses via defaults")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Validate every field before any computation runs.
    pub fn validate(&self) -> Result<()> {
        if !(self.grid.l > 0.0) || !self.grid.l.is_finite() {
            return Err(LabError::Config("grid.l must be positive".into()));
        }
        if self.grid.n < kdv_core::grid::Grid::MIN_INTERIOR {
            return Err(LabError::Config(format!(
                "grid.n = {} is below the stencil minimum of {}",
                self.grid.n,
                kdv_core::grid::Grid::MIN_INTERIOR
            )));
        }
        if self.time.dt < 0.0 || !self.time.dt.is_finite() {
            return Err(LabError::Config("time.dt must be nonnegative".into()));
        }
        if !(self.time.t_end > 0.0) {
            return Err(LabError::Config("time.t_end must be positive".into()));
        }
        if !(self.time.window_t > 0.0) {
            return Err(LabError::Config("time.window_t must be positive".into()));
        }
        if self.boundary.channel == 0 || self.boundary.channel > 3 {
            return Err(LabError::Config("boundary.channel must be 1, 2 or 3".into()));
        }
        if self.spectrum.count == 0 {
            return Err(LabError::Config("spectrum.count must be >= 1".into()));
        }
        if !(self.resolvent.omega_min > 0.0) || self.resolvent.omega_max <= self.resolvent.omega_min
        {
            return Err(LabError::Config(
                "resolvent omegas must satisfy 0 < omega_min < omega_max".into(),
            ));
        }
        if self.resolvent.samples < 2 {
            return Err(LabError::Config("resolvent.samples must be >= 2".into()));
        }
        if !(self.iteration.gamma > 0.0 && self.iteration.gamma < 1.0) {
            return Err(LabError::Config("iteration.gamma must lie in (0, 1)".into()));
        }
        if self.iteration.beta < 0.0 || self.iteration.b_star < 0.0 || self.iteration.y0 < 0.0 {
            return Err(LabError::Config(
                "iteration parameters must be nonnegative".into(),
            ));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(LabError::Config("sweep.values must be nonempty".into()));
            }
            if sw.values.len() > sw.max_runs {
                return Err(LabError::Config(format!(
                    "sweep has {} runs, above the cap of {}",
                    sw.values.len(),
                    sw.max_runs
                )));
            }
            if sw.child == Experiment::Sweep {
                return Err(LabError::Config("sweep cannot nest sweeps".into()));
            }
            crate::sweep::check_parameter_path(&sw.parameter)?;
        }
        if self.audit.window[0] >= self.audit.window[1] {
            return Err(LabError::Config("audit.window must be increasing".into()));
        }
        Ok(())
    }

    /// The time step after applying the default rule.
    pub fn resolved_dt(&self, nonlinear: bool) -> f64 {
        if self.time.dt > 0.0 {
            self.time.dt
        } else {
            let dx = self.grid.l / (self.grid.n as f64 + 1.0);
            if nonlinear {
                0.25 * dx
            } else {
                dx
            }
        }
    }
}
