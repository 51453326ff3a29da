//! Run configuration: TOML (or JSON by extension), unknown keys rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qusa_core::dynamics::{RunKind, ScheduleParams};
use qusa_core::hamiltonian::{HamiltonianParams, NoiseParams};
use qusa_core::network::{
    encode_exact_cover, AnnealSchedule, ExactCoverInstance, Model, QubitRef, TemperatureProfile,
    TriodeNetwork,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    AnnealClassical,
    SimulateComparison,
    SimulateProjected,
    SimulateSymmetrized,
    Ensemble,
    ZenoSweep,
    LeakSweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::AnnealClassical => "anneal-classical",
            Command::SimulateComparison => "simulate-comparison",
            Command::SimulateProjected => "simulate-projected",
            Command::SimulateSymmetrized => "simulate-symmetrized",
            Command::Ensemble => "ensemble",
            Command::ZenoSweep => "zeno-sweep",
            Command::LeakSweep => "leak-sweep",
        }
    }
}

/// Where the network comes from. At most one key may be set; none means
/// the two-triode toy network.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_cover_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_cover_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowRule {
    /// From doubling of `p_S(0)` to `p_S = 0.1`.
    Default,
    /// While the mean frustrated weight stays above `level`.
    Frustrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub rule: WindowRule,
    pub level: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            rule: WindowRule::Default,
            level: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n: usize,
    pub kind: RunKind,
    pub window: WindowConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n: 100,
            kind: RunKind::Projected,
            window: WindowConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    pub steps: usize,
    pub temperature: TemperatureProfile,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            steps: 1000,
            temperature: TemperatureProfile::Geometric {
                start: 2.0,
                end: 0.05,
            },
        }
    }
}

impl AnnealConfig {
    pub fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            steps: self.steps,
            temperature: self.temperature.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZenoConfig {
    /// Seed of the frozen field draw; the run seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_seed: Option<u64>,
    /// Seed of the initial phases; the run seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_seed: Option<u64>,
    /// Total time in units of `1/‖G′‖`.
    pub total_time_times_norm: f64,
    /// Each interval is the total time divided by one of these.
    pub interval_divisors: Vec<u32>,
}

impl Default for ZenoConfig {
    fn default() -> Self {
        ZenoConfig {
            field_seed: None,
            state_seed: None,
            total_time_times_norm: 5.0,
            interval_divisors: vec![8, 16, 32, 64, 128],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeakConfig {
    pub intervals: Vec<f64>,
    pub n: usize,
}

impl Default for LeakConfig {
    fn default() -> Self {
        LeakConfig {
            intervals: vec![80.0, 60.0, 40.0, 30.0, 20.0],
            n: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub model: Model,
    /// Enumeration cap for `solve`; the model default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Also write the field path of `simulate-*` runs.
    pub dump_fields: bool,
    pub network: NetworkSource,
    pub hamiltonian: HamiltonianParams,
    pub noise: NoiseParams,
    pub schedule: ScheduleParams,
    pub ensemble: EnsembleConfig,
    pub anneal: AnnealConfig,
    pub zeno: ZenoConfig,
    pub leak: LeakConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 0,
            out: None,
            model: Model::Triode,
            cap: None,
            dump_fields: false,
            network: NetworkSource::default(),
            hamiltonian: HamiltonianParams::default(),
            noise: NoiseParams::default(),
            schedule: ScheduleParams::default(),
            ensemble: EnsembleConfig::default(),
            anneal: AnnealConfig::default(),
            zeno: ZenoConfig::default(),
            leak: LeakConfig::default(),
        }
    }
}

/// A network plus, for exact-cover input, the instance and its variable map.
pub struct ResolvedNetwork {
    pub network: TriodeNetwork,
    pub cover: Option<(ExactCoverInstance, Vec<Option<QubitRef>>)>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let mut cfg: RunConfig = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.network.inline_files(base)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.hamiltonian.validate()?;
        self.noise.validate()?;
        self.schedule.validate()?;
        Ok(())
    }
}

fn read_relative(base: &Path, p: &Path) -> Result<String, CliError> {
    let full = if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    };
    fs::read_to_string(&full)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", full.display())))
}

impl NetworkSource {
    /// Replaces path keys by the file contents so the config is self-contained.
    fn inline_files(&mut self, base: &Path) -> Result<(), CliError> {
        let set = [
            self.path.is_some(),
            self.text.is_some(),
            self.exact_cover_path.is_some(),
            self.exact_cover_text.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if set > 1 {
            return Err(CliError::Usage(
                "network: set at most one of path, text, exact_cover_path, exact_cover_text".into(),
            ));
        }
        if let Some(p) = self.path.take() {
            self.text = Some(read_relative(base, &p)?);
        }
        if let Some(p) = self.exact_cover_path.take() {
            self.exact_cover_text = Some(read_relative(base, &p)?);
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ResolvedNetwork, CliError> {
        if let Some(text) = &self.exact_cover_text {
            let inst: ExactCoverInstance = text.parse()?;
            let enc = encode_exact_cover(&inst)?;
            return Ok(ResolvedNetwork {
                network: enc.network,
                cover: Some((inst, enc.representatives)),
            });
        }
        let network = match &self.text {
            Some(text) => text.parse()?,
            None => TriodeNetwork::toy(),
        };
        Ok(ResolvedNetwork {
            network,
            cover: None,
        })
    }
}
