//! The single JSON document every command reads.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cvqkd_core::adaptation::{HoldSnr, Scenario, StrategyConfig};
use cvqkd_core::harness::{CampaignConfig, SweepMode};
use cvqkd_core::ldpc::{build_code, extend_base, CodeParams, CodeSpec, ExtensionParams, ParityCheckMatrix, RateGrid};
use cvqkd_core::link::{distance_from_transmittance, DetectorModel, Modulation, XiModel};
use cvqkd_core::security::WindowSearch;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    #[serde(default)]
    pub strategies: Vec<StrategyConfig>,
    #[serde(default)]
    pub compare: Option<CompareConfig>,
    #[serde(default)]
    pub code: Option<CodeRef>,
    #[serde(default)]
    pub fer: Option<FerConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub modulation: Modulation,
    #[serde(default = "DetectorModel::ideal")]
    pub detector: DetectorModel,
    pub alpha_db_per_km: f64,
    pub xi_model: XiModel,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub hold: Option<HoldSnr>,
}

/// Evaluation grid, given either as fiber distances or as channel attenuations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    DistanceKm { start: f64, stop: f64, step: f64 },
    AttenuationDb { start: f64, stop: f64, step: f64 },
    DistanceList { km: Vec<f64> },
}

fn linspace(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(CliError::Config("grid needs step > 0 and stop >= start".into()));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

impl ScenarioConfig {
    /// Grid as distances; attenuations are converted with the fiber's `alpha`.
    pub fn distances(&self) -> Result<Vec<f64>, CliError> {
        match &self.grid {
            None => Err(CliError::Config("scenario.grid is required for this command".into())),
            Some(GridConfig::DistanceKm { start, stop, step }) => linspace(*start, *stop, *step),
            Some(GridConfig::DistanceList { km }) => Ok(km.clone()),
            Some(GridConfig::AttenuationDb { start, stop, step }) => linspace(*start, *stop, *step)?
                .into_iter()
                .map(|db| Ok(distance_from_transmittance(self.alpha_db_per_km, 10f64.powf(-db / 10.0))?))
                .collect(),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let s = Scenario {
            modulation: self.modulation,
            detector: self.detector,
            alpha_db_per_km: self.alpha_db_per_km,
            xi_model: self.xi_model,
            distances_km: self.distances()?,
            hold: self.hold.unwrap_or(HoldSnr::Distance { km: 0.0 }),
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// Code rates in bits per symbol.
    pub rates: Vec<f64>,
    #[serde(default)]
    pub search: Option<WindowSearch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_reference_beta")]
    pub reference_beta: f64,
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
}

fn default_reference_beta() -> f64 {
    0.95
}

fn default_mode() -> SweepMode {
    SweepMode::Analytic { beta_threshold: 1.0 }
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { reference_beta: default_reference_beta(), mode: default_mode() }
    }
}

/// Where a code comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeRef {
    Build {
        params: CodeParams,
    },
    /// A container written by `buildcode`.
    File {
        path: PathBuf,
    },
    /// An alist base matrix extended with a generated schedule.
    Alist {
        path: PathBuf,
        seed: u64,
        extension: ExtensionParams,
        grid: RateGrid,
        #[serde(default = "yes")]
        avoid_4_cycles: bool,
    },
}

fn yes() -> bool {
    true
}

impl CodeRef {
    fn path(&self) -> Option<&Path> {
        match self {
            CodeRef::Build { .. } => None,
            CodeRef::File { path } | CodeRef::Alist { path, .. } => Some(path),
        }
    }

    pub fn load(&self) -> Result<CodeSpec, CliError> {
        Ok(match self {
            CodeRef::Build { params } => build_code(params)?,
            CodeRef::File { path } => CodeSpec::from_bytes(&std::fs::read(path)?)?,
            CodeRef::Alist { path, seed, extension, grid, avoid_4_cycles } => {
                let base = ParityCheckMatrix::from_alist(&std::fs::read_to_string(path)?)?;
                extend_base(base, extension, grid, *seed, *avoid_4_cycles)?
            }
        })
    }
}

/// FER-versus-SNR measurement on a lossless simulated link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FerConfig {
    /// Binary code rates on the code's grid.
    pub code_rates: Vec<f64>,
    /// Received SNRs (linear).
    pub snrs: Vec<f64>,
    #[serde(default = "default_fer_symbols")]
    pub n_symbols: usize,
    #[serde(default = "default_reveal")]
    pub reveal_fraction: f64,
    #[serde(default)]
    pub campaign: CampaignConfig,
}

fn default_fer_symbols() -> usize {
    cvqkd_core::harness::DEFAULT_N_SYMBOLS
}

fn default_reveal() -> f64 {
    cvqkd_core::harness::DEFAULT_REVEAL_FRACTION
}

impl CliConfig {
    /// Parses and checks a configuration. Relative file references are resolved against
    /// `base_dir` and must already exist.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: CliConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(CodeRef::File { path } | CodeRef::Alist { path, .. }) = cfg.code.as_mut() {
            if path.is_relative() {
                *path = base_dir.join(&*path);
            }
        }
        if let Some(path) = cfg.code.as_ref().and_then(CodeRef::path) {
            if !path.is_file() {
                return Err(CliError::Config(format!("code file {} does not exist", path.display())));
            }
        }
        for s in &cfg.strategies {
            s.validate()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }
}
