//! TOML experiment configuration. Unknown keys are rejected everywhere.

use std::path::PathBuf;

use nichewave_core::experiments::{Direction, GridCoupling};
use nichewave_core::{GrowthFamily, KernelFamily, Scheme, SpectralOptions, StationaryOptions, Topology};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Artifact suffix: `<command>-<label>.csv` and `.json`.
    #[serde(default = "default_label")]
    pub label: String,
    /// Relative paths resolve against the config file's directory.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seed for randomized initial data.
    #[serde(default)]
    pub seed: u64,
    /// Worker pool size; `NICHEWAVE_WORKERS` takes precedence.
    pub workers: Option<usize>,
    pub kernel: KernelFamily,
    pub growth: GrowthFamily,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub reaction: ReactionConfig,
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub stationary: StationaryConfig,
    pub evolution: Option<EvolutionConfig>,
    pub sweep: Option<SweepConfig>,
    pub eps_star: Option<EpsStarConfig>,
    pub ess: Option<EssConfig>,
    pub fat_tail: Option<FatTailConfig>,
    pub audit: Option<AuditConfig>,
}

fn default_label() -> String {
    "run".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub dimension: usize,
    pub radius: f64,
    pub spacing: f64,
    pub topology: Topology,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            dimension: 1,
            radius: 8.0,
            spacing: 0.1,
            topology: Topology::BallTruncated,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub epsilon: f64,
    pub m: f64,
    pub alpha0: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            epsilon: 1.0,
            m: 0.0,
            alpha0: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReactionConfig {
    pub crowding: f64,
}

impl Default for ReactionConfig {
    fn default() -> Self {
        ReactionConfig { crowding: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralConfig {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        let d = SpectralOptions::default();
        SpectralConfig {
            tol: d.tol,
            max_iterations: d.max_iterations,
        }
    }
}

impl SpectralConfig {
    pub fn options(&self) -> SpectralOptions {
        SpectralOptions {
            tol: self.tol,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub scheme: Scheme,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        let d = StationaryOptions::default();
        StationaryConfig {
            tol: d.tol,
            max_iterations: d.max_iterations,
            scheme: d.scheme,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub horizon: f64,
    /// Explicit step; defaults to half the stability bound.
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub stride: f64,
    /// Distance at the horizon that counts as convergence.
    #[serde(default = "default_long_time_tol")]
    pub tol: f64,
    pub initial: InitialData,
}

fn default_stride() -> f64 {
    1.0
}

fn default_long_time_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// `value` everywhere.
    Constant { value: f64 },
    /// `value` where `a > 0`, zero elsewhere.
    Niche { value: f64 },
    /// Independent uniform samples on `[0, amplitude]`, drawn from `seed`.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub m: f64,
    pub epsilons: Vec<f64>,
    /// Set to run a limit study; omit for a plain sweep.
    pub direction: Option<Direction>,
    /// Target column for plain sweeps; defaults by `m`.
    pub target: Option<String>,
    #[serde(default)]
    pub coupling: GridCoupling,
    pub fd_spacing: Option<f64>,
    pub core_radius: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsStarConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_eps_star_tol")]
    pub tol: f64,
    #[serde(default)]
    pub coupling: GridCoupling,
}

fn default_eps_star_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssConfig {
    pub m: f64,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FatTailConfig {
    pub radii: Vec<f64>,
    #[serde(default = "default_eps_star_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub m: f64,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub coupling: GridCoupling,
}

impl Config {
    pub fn stationary_options(&self) -> StationaryOptions {
        StationaryOptions {
            tol: self.stationary.tol,
            max_iterations: self.stationary.max_iterations,
            scheme: self.stationary.scheme,
            spectral: self.spectral.options(),
        }
    }
}
