//! TOML experiment configuration.
//!
//! Every section has defaults, so an empty file is valid and runs the
//! reference experiments. Unknown keys are rejected. `workers` and `out`
//! are execution details and never enter the echoed config or its hash.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::base_map::{BaseMap, MarkovPartition, BranchShape};
use crate::error::{Error, Result};
use crate::fibered::{CoexistenceConfig, Coupling, FiberedSystem};
use crate::skew::{find_misiurewicz, Combinatorics, FiberMap, SkewSystem};
use crate::statistics::{Observable, Threshold, DEFAULT_BURN_IN};

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub system: SystemConfig,
    pub curves: CurvesConfig,
    pub recurrence: RecurrenceConfig,
    pub lyapunov: LyapunovConfig,
    pub density: DensityConfig,
    pub correlations: CorrelationsConfig,
    pub ldp: LdpConfig,
    pub clt: CltConfig,
    pub fibered: FiberedConfig,
    pub coexistence: CoexistenceConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            workers: None,
            out: None,
            system: SystemConfig::default(),
            curves: CurvesConfig::default(),
            recurrence: RecurrenceConfig::default(),
            lyapunov: LyapunovConfig::default(),
            density: DensityConfig::default(),
            correlations: CorrelationsConfig::default(),
            ldp: LdpConfig::default(),
            clt: CltConfig::default(),
            fibered: FiberedConfig::default(),
            coexistence: CoexistenceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Linear,
    PerturbedLinear,
    Quadratic,
    Breakpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseConfig {
    pub kind: BaseKind,
    pub branches: usize,
    /// Sine amplitude for `perturbed_linear`.
    pub amplitude: f64,
    pub frequency: f64,
    /// Curvature for `quadratic`.
    pub q: f64,
    /// Interior and end points for `breakpoints`, starting at 0.
    pub breakpoints: Vec<f64>,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self { kind: BaseKind::Linear, branches: 16, amplitude: 0.0, frequency: 8.0, q: 0.0, breakpoints: Vec::new() }
    }
}

impl BaseConfig {
    pub fn build(&self) -> Result<BaseMap> {
        match self.kind {
            BaseKind::Linear => BaseMap::uniform_linear(self.branches),
            BaseKind::PerturbedLinear => BaseMap::perturbed_linear(self.branches, self.amplitude, self.frequency),
            BaseKind::Quadratic => BaseMap::quadratic(self.branches, self.q),
            BaseKind::Breakpoints => BaseMap::new(
                MarkovPartition::from_breakpoints(self.breakpoints.clone())?,
                BranchShape::Linear,
                None,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Fiber parameter; the crit-to-period-2 Misiurewicz root when absent.
    pub a0: Option<f64>,
    pub alpha: f64,
    pub base: BaseConfig,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { a0: None, alpha: 1e-2, base: BaseConfig::default() }
    }
}

impl SystemConfig {
    pub fn a0(&self) -> Result<f64> {
        match self.a0 {
            Some(a) => Ok(a),
            None => find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12),
        }
    }

    pub fn build(&self) -> Result<SkewSystem> {
        self.build_with_alpha(self.alpha)
    }

    pub fn build_with_alpha(&self, alpha: f64) -> Result<SkewSystem> {
        SkewSystem::new(self.base.build()?, FiberMap::viana(self.a0()?, alpha))
    }

    /// `α = 0`, `a₀ = 2` on the same base.
    pub fn control(&self) -> Result<SkewSystem> {
        SkewSystem::new(self.base.build()?, FiberMap::viana(2.0, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvesConfig {
    pub alpha: f64,
    pub count: usize,
    pub nodes: usize,
    pub strip_triples: usize,
    pub max_j: usize,
    pub displacement_curves: usize,
    /// Random itineraries per depth for the distortion checks.
    pub itineraries: usize,
    pub max_depth: usize,
    /// C³ size of the sine perturbation of the base.
    pub perturbation: f64,
}

impl Default for CurvesConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            count: 100,
            nodes: 100_000,
            strip_triples: 1000,
            max_j: 5,
            displacement_curves: 100,
            itineraries: 200,
            max_depth: 6,
            perturbation: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecurrenceConfig {
    pub alpha_ladder: Vec<f64>,
    pub ladder_samples: usize,
    pub ladder_cap: usize,
    pub n_grid: Vec<usize>,
    pub samples: usize,
    pub r_min: u32,
    pub r_max: u32,
    pub eta: f64,
    pub tail_nodes: usize,
    /// Heavy-return level `c` in `Σ heavy depths ≥ c n`.
    pub heavy_c: f64,
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        Self {
            alpha_ladder: vec![1e-2, 1e-3, 1e-4],
            ladder_samples: 1000,
            ladder_cap: 100_000,
            n_grid: vec![100, 1000, 10_000],
            samples: 1000,
            r_min: 2,
            r_max: 10,
            eta: 0.1,
            tail_nodes: 100_000,
            heavy_c: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovConfig {
    pub n: usize,
    pub samples: usize,
    /// Also run the `α = 0`, `a₀ = 2` control.
    pub control: bool,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self { n: 10_000, samples: 1000, control: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    /// Use the `α = 0`, `a₀ = 2` control instead of `[system]`.
    pub control: bool,
    pub burn_in: usize,
    pub n: usize,
    pub samples: usize,
    pub theta_bins: usize,
    pub x_bins: usize,
    /// Points per bin for the transfer-operator check; 0 skips it.
    pub ulam_points: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self { control: true, burn_in: DEFAULT_BURN_IN, n: 10_000, samples: 100, theta_bins: 20, x_bins: 200, ulam_points: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationsConfig {
    pub pairs: Vec<[Observable; 2]>,
    pub max_lag: usize,
    pub n: usize,
    pub samples: usize,
    pub burn_in: usize,
}

impl Default for CorrelationsConfig {
    fn default() -> Self {
        Self {
            pairs: vec![[Observable::X, Observable::X], [Observable::Theta, Observable::Theta]],
            max_lag: 50,
            n: 10_000,
            samples: 100,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaKind {
    Absolute,
    Std,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdpConfig {
    pub observable: Observable,
    pub delta: f64,
    pub delta_kind: DeltaKind,
    pub n_grid: Vec<usize>,
    pub samples: usize,
    pub burn_in: usize,
}

impl Default for LdpConfig {
    fn default() -> Self {
        Self {
            observable: Observable::Theta,
            delta: 0.1,
            delta_kind: DeltaKind::Std,
            n_grid: vec![100, 1000, 10_000],
            samples: 4000,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

impl LdpConfig {
    pub fn threshold(&self) -> Threshold {
        match self.delta_kind {
            DeltaKind::Absolute => Threshold::Absolute(self.delta),
            DeltaKind::Std => Threshold::StdMultiple(self.delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltConfig {
    pub observable: Observable,
    pub n: usize,
    pub samples: usize,
    pub burn_in: usize,
}

impl Default for CltConfig {
    fn default() -> Self {
        Self { observable: Observable::X, n: 10_000, samples: 1000, burn_in: DEFAULT_BURN_IN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    Zero,
    Sine,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub kind: CouplingKind,
    /// Defaults to the amplitude that spends the whole C³ budget.
    pub amplitude: Option<f64>,
    pub frequency: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self { kind: CouplingKind::Sine, amplitude: None, frequency: 1.0, center: 0.5, width: 0.25 }
    }
}

impl CouplingConfig {
    pub fn build(&self, epsilon: f64) -> Coupling {
        match self.kind {
            CouplingKind::Zero => Coupling::Zero,
            CouplingKind::Sine => match self.amplitude {
                Some(amplitude) => Coupling::Sine { amplitude, frequency: self.frequency },
                None if self.frequency == 1.0 => Coupling::sine_with_budget(epsilon),
                None => {
                    let w = 2.0 * std::f64::consts::PI * self.frequency.abs();
                    Coupling::Sine { amplitude: epsilon / w.max(1.0).powi(3), frequency: self.frequency }
                }
            },
            CouplingKind::Bump => {
                let unit = crate::skew::FiberBump { center: self.center, width: self.width, amplitude: 1.0 };
                let amplitude = self.amplitude.unwrap_or(epsilon / unit.c3_size());
                Coupling::Bump(crate::skew::FiberBump { amplitude, ..unit })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberedConfig {
    pub c: f64,
    pub epsilon: f64,
    pub coupling: CouplingConfig,
    pub base: BaseConfig,
    pub n: usize,
    pub samples: usize,
    pub pairing_offset: f64,
    pub pairing_samples: usize,
    pub invariance_samples: usize,
    pub invariance_steps: usize,
    /// Also run the uncoupled system.
    pub control: bool,
}

impl Default for FiberedConfig {
    fn default() -> Self {
        Self {
            c: 0.5,
            epsilon: 0.01,
            coupling: CouplingConfig::default(),
            base: BaseConfig::default(),
            n: 10_000,
            samples: 1000,
            pairing_offset: 1e-3,
            pairing_samples: 10,
            invariance_samples: 100,
            invariance_steps: 10_000,
            control: true,
        }
    }
}

impl FiberedConfig {
    pub fn build(&self) -> Result<FiberedSystem> {
        FiberedSystem::new(self.base.build()?, self.c, self.coupling.build(self.epsilon), self.epsilon)
    }

    pub fn build_uncoupled(&self) -> Result<FiberedSystem> {
        FiberedSystem::new(self.base.build()?, self.c, Coupling::Zero, 0.0)
    }
}

/// Experiments the runner knows, plus the acceptance battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Curves,
    Recurrence,
    Lyapunov,
    Density,
    Correlations,
    Ldp,
    Clt,
    Fibered,
    Coexistence,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Curves => "curves",
            Experiment::Recurrence => "recurrence",
            Experiment::Lyapunov => "lyapunov",
            Experiment::Density => "density",
            Experiment::Correlations => "correlations",
            Experiment::Ldp => "ldp",
            Experiment::Clt => "clt",
            Experiment::Fibered => "fibered",
            Experiment::Coexistence => "coexistence",
            Experiment::Verify => "verify",
        }
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return config_err(format!("{name} must be positive"));
    }
    Ok(())
}

fn unit_alpha(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return config_err(format!("{name} must lie in (0, 1), got {a}"));
    }
    Ok(())
}

fn grid(name: &str, g: &[usize]) -> Result<()> {
    if g.is_empty() || g.contains(&0) {
        return config_err(format!("{name} must be a nonempty list of positive integers"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The config as echoed into every summary.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// SHA-256 of the echoed config, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.echo()).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Schema checks beyond what deserialization enforces, for the sections
    /// the experiment reads.
    pub fn validate(&self, exp: Experiment) -> Result<()> {
        if self.workers == Some(0) {
            return config_err("workers must be positive");
        }
        let sys = &self.system;
        if !(sys.alpha >= 0.0 && sys.alpha < 1.0) {
            return config_err(format!("system.alpha must lie in [0, 1), got {}", sys.alpha));
        }
        if let Some(a) = sys.a0 {
            if !(a > 0.0 && a <= 2.0) {
                return config_err(format!("system.a0 must lie in (0, 2], got {a}"));
            }
        }
        positive("system.base.branches", sys.base.branches)?;
        match exp {
            Experiment::Curves => {
                let c = &self.curves;
                unit_alpha("curves.alpha", c.alpha)?;
                positive("curves.count", c.count)?;
                positive("curves.nodes", c.nodes)?;
                if c.max_j == 0 || c.max_j > 8 {
                    return config_err("curves.max_j must lie in 1..=8");
                }
                if c.max_depth == 0 || c.max_depth > 12 {
                    return config_err("curves.max_depth must lie in 1..=12");
                }
                if !(c.perturbation >= 0.0) {
                    return config_err("curves.perturbation must be nonnegative");
                }
            }
            Experiment::Recurrence => {
                let r = &self.recurrence;
                unit_alpha("system.alpha", sys.alpha)?;
                if r.alpha_ladder.is_empty() {
                    return config_err("recurrence.alpha_ladder must be nonempty");
                }
                for &a in &r.alpha_ladder {
                    unit_alpha("recurrence.alpha_ladder entries", a)?;
                }
                grid("recurrence.n_grid", &r.n_grid)?;
                positive("recurrence.samples", r.samples)?;
                positive("recurrence.ladder_samples", r.ladder_samples)?;
                positive("recurrence.tail_nodes", r.tail_nodes)?;
                if r.r_min > r.r_max {
                    return config_err("recurrence.r_min must not exceed r_max");
                }
                if !(r.eta > 0.0 && r.eta <= 1.0 / 3.0) {
                    return config_err("recurrence.eta must lie in (0, 1/3]");
                }
            }
            Experiment::Lyapunov => {
                if self.lyapunov.n < 1000 {
                    return config_err("lyapunov.n must be at least 1000");
                }
                positive("lyapunov.samples", self.lyapunov.samples)?;
            }
            Experiment::Density => {
                let d = &self.density;
                positive("density.n", d.n)?;
                positive("density.samples", d.samples)?;
                positive("density.theta_bins", d.theta_bins)?;
                positive("density.x_bins", d.x_bins)?;
                if d.burn_in < DEFAULT_BURN_IN {
                    return config_err(format!("density.burn_in must be at least {DEFAULT_BURN_IN}"));
                }
            }
            Experiment::Correlations => {
                let c = &self.correlations;
                if c.pairs.is_empty() {
                    return config_err("correlations.pairs must be nonempty");
                }
                if c.n < c.max_lag + 2 {
                    return config_err("correlations.n must exceed max_lag + 1");
                }
                positive("correlations.samples", c.samples)?;
            }
            Experiment::Ldp => {
                let l = &self.ldp;
                grid("ldp.n_grid", &l.n_grid)?;
                positive("ldp.samples", l.samples)?;
                if !(l.delta > 0.0) {
                    return config_err("ldp.delta must be positive");
                }
            }
            Experiment::Clt => {
                positive("clt.n", self.clt.n)?;
                if self.clt.samples < 2 {
                    return config_err("clt.samples must be at least 2");
                }
            }
            Experiment::Fibered => {
                let f = &self.fibered;
                if !(f.epsilon >= 0.0) {
                    return config_err("fibered.epsilon must be nonnegative");
                }
                if !(f.c > -0.25 && f.c <= 2.0) {
                    return config_err("fibered.c must lie in (-1/4, 2]");
                }
                positive("fibered.n", f.n)?;
                positive("fibered.samples", f.samples)?;
                if !(f.pairing_offset > 0.0) {
                    return config_err("fibered.pairing_offset must be positive");
                }
            }
            Experiment::Coexistence => {
                let c = &self.coexistence;
                unit_alpha("coexistence.alpha", c.alpha)?;
                if c.n < 1000 {
                    return config_err("coexistence.n must be at least 1000");
                }
                positive("coexistence.samples", c.samples)?;
                if !(c.width > 0.0) {
                    return config_err("coexistence.width must be positive");
                }
            }
            Experiment::Verify => {}
        }
        Ok(())
    }
}
