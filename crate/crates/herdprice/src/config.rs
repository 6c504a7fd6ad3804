//! Run configuration: JSON file, command-line overrides and resolution.
//!
//! Every section is optional. The resolved configuration written into output
//! files has the same schema with all fields relevant to the command filled
//! in, so feeding it back through `--config` repeats the run exactly.

use std::path::PathBuf;

use herdprice_core::bs::PriceConvention;
use herdprice_core::calibration::{preset, DeltaMode, Jitter, Protocol, StepSizes, DEFAULT_STARTS};
use herdprice_core::dynamics::{DriftTarget, TRADING_DAY};
use herdprice_core::mc::{SimulationSpec, DEFAULT_MATURITIES, DEFAULT_PATHS, DEFAULT_STRIKES};
use herdprice_core::params::{ModelParams, ParamName};
use herdprice_core::simplex::SimplexOptions;
use serde::{Deserialize, Serialize};

use crate::surface_io::SurfaceFormat;

pub const DEFAULT_SEED: u64 = 1;
/// Paths per objective evaluation during calibration.
pub const DEFAULT_CALIBRATION_PATHS: usize = 20_000;
pub const DEFAULT_GRID_STEP: f64 = 0.05;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "is_default")]
    pub model: ModelConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub simulation: SimulationConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub surface: SurfaceConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub calibration: CalibrationConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub diagnose: DiagnoseConfig,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// A preset name and/or explicit parameter values; explicit values win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "is_default")]
    pub params: ParamsPatch,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsPatch {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_asym: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_up: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_par: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_market: Option<f64>,
}

impl ParamsPatch {
    fn slot(&mut self, name: ParamName) -> &mut Option<f64> {
        match name {
            ParamName::SigmaAlpha => &mut self.sigma_alpha,
            ParamName::KAsym => &mut self.k_asym,
            ParamName::ILow => &mut self.i_low,
            ParamName::IUp => &mut self.i_up,
            ParamName::Mu => &mut self.mu,
            ParamName::Alpha0 => &mut self.alpha0,
            ParamName::Beta0 => &mut self.beta0,
            ParamName::BPar => &mut self.b_par,
            ParamName::DeltaMarket => &mut self.delta_market,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        *self.slot(name) = Some(value);
    }

    pub fn apply(&self, base: &mut ModelParams) {
        let mut me = self.clone();
        for name in ParamName::ALL {
            if let Some(v) = *me.slot(name) {
                base.set(name, v);
            }
        }
    }

    pub fn full(p: &ModelParams) -> Self {
        let mut out = ParamsPatch::default();
        for name in ParamName::ALL {
            out.set(name, p.get(name));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maturities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strikes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftTarget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_star: Option<f64>,
    /// Also write the community path of path 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_path: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<SurfaceFormat>,
    /// Overrides the model's market offset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_market: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<PriceConvention>,
    /// Invert an existing payoff grid instead of simulating.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free: Option<Vec<ParamName>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_mode: Option<DeltaMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_maturity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplex: Option<SimplexOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<StepSizes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<Jitter>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl From<herdprice_core::Error> for ConfigError {
    fn from(e: herdprice_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("config line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        let mut p = match &self.model.preset {
            Some(name) => preset(name)?.params,
            None => ModelParams::default(),
        };
        self.model.params.apply(&mut p);
        Ok(p)
    }

    /// Simulation spec with defaults filled in and validated.
    pub fn simulation(&self) -> Result<SimulationSpec, ConfigError> {
        let model = self.model()?;
        model.validate()?;
        let s = &self.simulation;
        // a preset brings the maturities it was fitted at
        let preset_maturities = match &self.model.preset {
            Some(name) => Some(preset(name)?.maturities.to_vec()),
            None => None,
        };
        let spec = SimulationSpec {
            model,
            maturities: s.maturities.clone().or(preset_maturities).unwrap_or_else(|| DEFAULT_MATURITIES.to_vec()),
            strikes: s.strikes.clone().unwrap_or_else(|| DEFAULT_STRIKES.to_vec()),
            n_paths: s.n_paths.unwrap_or(DEFAULT_PATHS),
            dt: s.dt.unwrap_or(TRADING_DAY),
            base_seed: self.seed(),
            drift: s.drift.unwrap_or_default(),
            gamma_star: s.gamma_star.unwrap_or(0.5),
            diagnostics: false,
        };
        if spec.dt.is_nan() || spec.dt <= 0.0 || !spec.dt.is_finite() {
            return Err(ConfigError(format!("time step must be positive, got {}", spec.dt)));
        }
        spec.validate()?;
        Ok(spec)
    }

    fn resolved_model(&self) -> Result<ModelConfig, ConfigError> {
        Ok(ModelConfig { preset: self.model.preset.clone(), params: ParamsPatch::full(&self.model()?) })
    }

    fn resolved_simulation(&self, spec: &SimulationSpec) -> SimulationConfig {
        SimulationConfig {
            n_paths: Some(spec.n_paths),
            dt: Some(spec.dt),
            maturities: Some(spec.maturities.clone()),
            strikes: Some(spec.strikes.clone()),
            drift: Some(spec.drift),
            gamma_star: Some(spec.gamma_star),
            dump_path: Some(self.simulation.dump_path.unwrap_or(false)),
        }
    }

    pub fn surface_format(&self) -> SurfaceFormat {
        self.surface.format.unwrap_or(SurfaceFormat::Json)
    }

    pub fn convention(&self) -> PriceConvention {
        self.surface.convention.unwrap_or_default()
    }

    /// The configuration echoed into outputs of `command`: everything that
    /// affects the results, nothing that does not (threads, output folder).
    pub fn resolved(&self, command: Command) -> Result<RunConfig, ConfigError> {
        let mut out = RunConfig { seed: Some(self.seed()), ..RunConfig::default() };
        match command {
            Command::Simulate => {
                let spec = self.simulation()?;
                out.model = self.resolved_model()?;
                out.simulation = self.resolved_simulation(&spec);
            }
            Command::Surface => {
                if self.surface.payoffs.is_none() {
                    let spec = self.simulation()?;
                    out.simulation = self.resolved_simulation(&spec);
                    out.simulation.dump_path = None;
                }
                out.model = self.resolved_model()?;
                out.surface = SurfaceConfig {
                    format: Some(self.surface_format()),
                    delta_market: self.surface.delta_market,
                    convention: Some(self.convention()),
                    payoffs: self.surface.payoffs.clone(),
                };
            }
            Command::Calibrate => {
                out.model = self.resolved_model()?;
                let c = &self.calibration;
                out.simulation = SimulationConfig {
                    dt: Some(self.simulation.dt.unwrap_or(TRADING_DAY)),
                    drift: Some(self.simulation.drift.unwrap_or_default()),
                    gamma_star: Some(self.simulation.gamma_star.unwrap_or(0.5)),
                    ..SimulationConfig::default()
                };
                let protocol = c.protocol.unwrap_or(Protocol::Full);
                out.calibration = CalibrationConfig {
                    target: c.target.clone(),
                    protocol: Some(protocol),
                    free: Some(c.free.clone().unwrap_or_else(|| protocol.free())),
                    delta_mode: Some(c.delta_mode.unwrap_or_default()),
                    n_starts: Some(c.n_starts.unwrap_or(DEFAULT_STARTS)),
                    per_maturity: Some(c.per_maturity.unwrap_or(protocol.per_maturity())),
                    n_paths: Some(c.n_paths.unwrap_or(DEFAULT_CALIBRATION_PATHS)),
                    simplex: Some(c.simplex.unwrap_or_default()),
                    steps: Some(c.steps.unwrap_or_default()),
                    jitter: Some(c.jitter.unwrap_or_default()),
                };
            }
            Command::Diagnose => {
                out.diagnose = DiagnoseConfig {
                    alpha: self.diagnose.alpha,
                    beta: self.diagnose.beta,
                    grid_step: Some(self.diagnose.grid_step.unwrap_or(DEFAULT_GRID_STEP)),
                };
            }
            Command::Presets => {}
        }
        Ok(out)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configuration serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Surface,
    Calibrate,
    Diagnose,
    Presets,
}
