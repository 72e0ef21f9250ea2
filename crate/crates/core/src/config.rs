//! Run configuration, read from TOML in strict mode: unknown keys are
//! errors, and every range is checked before a grid is allocated.
//!
//! ```toml
//! system = "oldroyd"          # oldroyd | mhd | ns-forced
//! n = 64
//! length = 6.283185307179586  # default 2π
//!
//! [params]                    # mhd takes `nu` only
//! nu = 1.0
//! b = 1.0
//!
//! [initial.velocity]
//! recipe = "random"
//! seed = 1
//! k_max = 4
//! slope = -1.0
//! amplitude = 0.5
//!
//! [time]
//! dt = 5e-4
//! t_final = 1.0
//! ```
//!
//! Omitted values take the normalized coefficients, zero initial data,
//! `dt = 1e-3`, `t_final = 1`, `alpha = beta = 0.5` and output directory
//! `out`. The environment variable [`OUTPUT_DIR_ENV`] overrides the output
//! directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Scheme, StepControls};
use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;
use crate::oldroyd::{OldroydParams, SteadyForcing};
use crate::recipes;

pub const OUTPUT_DIR_ENV: &str = "LPFLOW_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    Oldroyd,
    Mhd,
    NsForced,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Oldroyd => "oldroyd",
            System::Mhd => "mhd",
            System::NsForced => "ns-forced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhdParams {
    #[serde(default = "one")]
    pub nu: f64,
}

/// Coefficients of the configured system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemParams {
    // tried first: the Oldroyd keys are a strict superset
    Mhd(MhdParams),
    Oldroyd(OldroydParams),
}

/// Velocity or magnetic initial field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "recipe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VectorRecipe {
    #[default]
    Zero,
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Band-limited random solenoidal field, scaled to `‖·‖_∞ = amplitude`.
    Random {
        seed: u64,
        k_max: u32,
        #[serde(default = "minus_one")]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "recipe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StressRecipe {
    #[default]
    Zero,
    /// `τ = value · I`.
    Isotropic { value: f64 },
    /// Smooth stress with `det(I + 2τ) > 1.2`.
    Conformation {
        seed: u64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

/// Steady body force for `ns-forced`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "recipe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingRecipe {
    #[default]
    None,
    /// `f = (amplitude · sin(k y), 0)` in box units.
    Kolmogorov {
        amplitude: f64,
        #[serde(default = "default_wave")]
        k: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub velocity: VectorRecipe,
    #[serde(default)]
    pub stress: StressRecipe,
    #[serde(default)]
    pub magnetic: VectorRecipe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub dealias: bool,
    pub velocity_cap: f64,
    /// Steps between samples; the first and last steps are always sampled.
    pub sample_every: u64,
    /// Steps between periodic checkpoints; 0 keeps only the final one.
    pub checkpoint_every: u64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        let c = StepControls::default();
        TimeConfig {
            dt: 1e-3,
            t_final: 1.0,
            scheme: c.scheme,
            cfl_safety: c.cfl_safety,
            dealias: c.dealias,
            velocity_cap: c.velocity_cap,
            sample_every: 10,
            checkpoint_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    /// Hölder exponent of the trackers, in `(0, 1)`.
    pub alpha: f64,
    /// Hölder exponent of the log-interpolation checks, in `(0, 1)`.
    pub beta: f64,
    /// Tail windows for `sup_q ∫_{T−δ}^{T} ‖Δ_q τ‖_∞ dt`.
    pub deltas: Vec<f64>,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            alpha: 0.5,
            beta: 0.5,
            deltas: vec![0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir() }
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub system: System,
    pub n: usize,
    pub length: f64,
    pub params: SystemParams,
    pub initial: InitialData,
    pub forcing: ForcingRecipe,
    pub time: TimeConfig,
    pub monitor: MonitorConfig,
    pub output: OutputConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: System,
    n: usize,
    #[serde(default = "two_pi")]
    length: f64,
    #[serde(default)]
    params: Option<toml::Table>,
    #[serde(default)]
    initial: InitialData,
    #[serde(default)]
    forcing: ForcingRecipe,
    #[serde(default)]
    time: TimeConfig,
    #[serde(default)]
    monitor: MonitorConfig,
    #[serde(default)]
    output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

fn two_pi() -> f64 {
    std::f64::consts::TAU
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_delta() -> f64 {
    0.02
}

fn default_wave() -> u32 {
    1
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(config_err(field, format!("{v} must be positive and finite")));
    }
    Ok(())
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(config_err(field, format!("{v} must be finite and non-negative")));
    }
    Ok(())
}

fn open_unit(field: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(config_err(field, format!("{v} must lie in (0, 1)")));
    }
    Ok(())
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let table = raw.params.unwrap_or_default();
    let params = match raw.system {
        System::Oldroyd | System::NsForced => SystemParams::Oldroyd(
            table
                .try_into()
                .map_err(|e: toml::de::Error| config_err("[params]", e.message()))?,
        ),
        System::Mhd => SystemParams::Mhd(
            table
                .try_into()
                .map_err(|e: toml::de::Error| config_err("[params]", e.message()))?,
        ),
    };
    let config = SimulationConfig {
        system: raw.system,
        n: raw.n,
        length: raw.length,
        params,
        initial: raw.initial,
        forcing: raw.forcing,
        time: raw.time,
        monitor: raw.monitor,
        output: raw.output,
    };
    config.validate()?;
    Ok(config)
}

/// Reads and parses a config file; the environment override of the output
/// directory is applied.
pub fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        config.output.dir = PathBuf::from(dir);
    }
    Ok(config)
}

impl SimulationConfig {
    /// Defaults for the given system and grid size.
    pub fn new(system: System, n: usize) -> Result<Self> {
        parse_config(&format!("system = \"{}\"\nn = {n}\n", system.name()))
    }

    /// Checks every range without allocating a grid.
    pub fn validate(&self) -> Result<()> {
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(config_err(
                "n",
                format!("{} must be a power of two and at least 16", self.n),
            ));
        }
        positive("length", self.length)?;
        match (&self.params, self.system) {
            (SystemParams::Oldroyd(p), System::Oldroyd | System::NsForced) => {
                p.validate().map_err(|e| match e {
                    Error::InvalidArgument(msg) => config_err("[params]", msg),
                    other => other,
                })?
            }
            (SystemParams::Mhd(p), System::Mhd) => non_negative("params.nu", p.nu)?,
            _ => return Err(config_err("[params]", "coefficients do not match the system")),
        }
        let t = &self.time;
        positive("time.dt", t.dt)?;
        positive("time.t_final", t.t_final)?;
        positive("time.cfl_safety", t.cfl_safety)?;
        positive("time.velocity_cap", t.velocity_cap)?;
        if t.sample_every == 0 {
            return Err(config_err("time.sample_every", "must be at least 1"));
        }
        let steps = t.t_final / t.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps.round() < 1.0 {
            return Err(config_err(
                "time.t_final",
                format!("{} is not a whole number of steps of dt = {}", t.t_final, t.dt),
            ));
        }
        open_unit("monitor.alpha", self.monitor.alpha)?;
        open_unit("monitor.beta", self.monitor.beta)?;
        for &d in &self.monitor.deltas {
            positive("monitor.deltas", d)?;
        }
        let top = (self.n / 2 - 1) as u32;
        let vector = |field: &str, r: &VectorRecipe| -> Result<()> {
            match *r {
                VectorRecipe::Zero => Ok(()),
                VectorRecipe::TaylorGreen { amplitude } => {
                    finite(&format!("{field}.amplitude"), amplitude)
                }
                VectorRecipe::Random {
                    k_max,
                    slope,
                    amplitude,
                    ..
                } => {
                    if k_max == 0 || k_max > top {
                        return Err(config_err(
                            &format!("{field}.k_max"),
                            format!("{k_max} must lie in [1, {top}]"),
                        ));
                    }
                    finite(&format!("{field}.slope"), slope)?;
                    non_negative(&format!("{field}.amplitude"), amplitude)
                }
            }
        };
        vector("initial.velocity", &self.initial.velocity)?;
        vector("initial.magnetic", &self.initial.magnetic)?;
        match self.initial.stress {
            StressRecipe::Zero => {}
            StressRecipe::Isotropic { value } => finite("initial.stress.value", value)?,
            StressRecipe::Conformation { epsilon, delta, .. } => {
                non_negative("initial.stress.epsilon", epsilon)?;
                non_negative("initial.stress.delta", delta)?;
            }
        }
        if self.system != System::Mhd && self.initial.magnetic != VectorRecipe::Zero {
            return Err(config_err("initial.magnetic", "only the mhd system has a magnetic field"));
        }
        if self.system == System::Mhd && self.initial.stress != StressRecipe::Zero {
            return Err(config_err("initial.stress", "the mhd system has no stress field"));
        }
        match self.forcing {
            ForcingRecipe::None => {}
            ForcingRecipe::Kolmogorov { amplitude, k } => {
                if self.system != System::NsForced {
                    return Err(config_err("forcing", "only the ns-forced system takes a force"));
                }
                finite("forcing.amplitude", amplitude)?;
                if k == 0 || k > top {
                    return Err(config_err("forcing.k", format!("{k} must lie in [1, {top}]")));
                }
            }
        }
        Ok(())
    }

    /// Step controls for the configured time section.
    pub fn controls(&self) -> StepControls {
        let t = &self.time;
        StepControls {
            dt: t.dt,
            scheme: t.scheme,
            cfl_safety: t.cfl_safety,
            dealias: t.dealias,
            velocity_cap: t.velocity_cap,
            disable_nonlinear: false,
        }
    }

    /// Number of steps from `t = 0` to `t_final`.
    pub fn total_steps(&self) -> u64 {
        (self.time.t_final / self.time.dt).round() as u64
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.n, self.length)
    }

    /// Coefficient `b` used by the `‖τ‖_∞ + |b| ‖τ‖²_{L²}` criterion.
    pub fn criterion_b(&self) -> f64 {
        match self.params {
            SystemParams::Oldroyd(p) => p.b,
            SystemParams::Mhd(_) => 1.0,
        }
    }

    /// The config as echoed into reports: the output directory is left out
    /// so identical runs in different directories give identical reports.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output");
        }
        v
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(config_err(field, format!("{v} must be finite")));
    }
    Ok(())
}

pub(crate) fn build_vector(grid: &Arc<Grid>, r: &VectorRecipe, magnetic: bool) -> Result<VectorField> {
    Ok(match *r {
        VectorRecipe::Zero => VectorField::zeros(grid),
        VectorRecipe::TaylorGreen { amplitude } => recipes::taylor_green(grid, amplitude),
        VectorRecipe::Random {
            seed,
            k_max,
            slope,
            amplitude,
        } if magnetic => recipes::random_magnetic(grid, seed, k_max, slope, amplitude)?,
        VectorRecipe::Random {
            seed,
            k_max,
            slope,
            amplitude,
        } => recipes::random_solenoidal(grid, seed, k_max, slope, amplitude)?,
    })
}

pub(crate) fn build_stress(grid: &Arc<Grid>, r: &StressRecipe) -> Result<SymTensorField> {
    Ok(match *r {
        StressRecipe::Zero => SymTensorField::zeros(grid),
        StressRecipe::Isotropic { value } => SymTensorField::constant(grid, value, 0.0, value),
        StressRecipe::Conformation {
            seed,
            epsilon,
            delta,
        } => recipes::conformation_stress(grid, seed, epsilon, delta)?,
    })
}

pub(crate) fn build_forcing(grid: &Arc<Grid>, r: &ForcingRecipe) -> SteadyForcing {
    let k = grid.scale();
    SteadyForcing(match *r {
        ForcingRecipe::None => VectorField::zeros(grid),
        ForcingRecipe::Kolmogorov { amplitude, k: m } => VectorField {
            x: ScalarField::from_fn(grid, |_, y| amplitude * (k * m as f64 * y).sin()),
            y: ScalarField::zeros(grid),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = parse_config("system = \"oldroyd\"\nn = 64\n").unwrap();
        assert_eq!(c.params, SystemParams::Oldroyd(OldroydParams::default()));
        assert_eq!(c.length, std::f64::consts::TAU);
        assert_eq!(c.time, TimeConfig::default());
        assert_eq!(c.initial, InitialData::default());
        assert_eq!(c.total_steps(), 1000);
    }

    #[test]
    fn slip_parameter_range_named() {
        let e = parse_config("system = \"oldroyd\"\nn = 64\n[params]\nb = 1.5\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("b = 1.5") && msg.contains("[-1, 1]"), "{msg}");
    }

    #[test]
    fn grid_size_must_be_power_of_two() {
        let e = parse_config("system = \"oldroyd\"\nn = 48\n").unwrap_err();
        assert!(e.to_string().contains("power of two"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        for doc in [
            "system = \"oldroyd\"\nn = 64\nsedd = 1\n",
            "system = \"oldroyd\"\nn = 64\n[time]\ndtt = 0.1\n",
            "system = \"mhd\"\nn = 64\n[params]\nb = 1.0\n",
            "system = \"oldroyd\"\nn = 64\n[initial.velocity]\nrecipe = \"random\"\nseed = 1\nk_max = 2\nsklope = 1\n",
        ] {
            let e = parse_config(doc).unwrap_err();
            assert!(e.to_string().contains("unknown field"), "{doc}: {e}");
        }
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = parse_config("system = \"oldroyd\"\nn = 64\n[time]\ndt = \n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
    }

    #[test]
    fn step_count_must_be_whole() {
        let doc = "system = \"oldroyd\"\nn = 16\n[time]\ndt = 0.3\nt_final = 1.0\n";
        assert!(parse_config(doc).is_err());
    }

    #[test]
    fn echo_omits_output_dir() {
        let c = SimulationConfig::new(System::Mhd, 32).unwrap();
        let e = c.echo();
        assert!(e.get("output").is_none());
        assert_eq!(e["system"], "mhd");
        assert_eq!(e["params"]["nu"], 1.0);
    }
}
