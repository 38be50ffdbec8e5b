//! Run configuration: one JSON file drives every subcommand.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use beamspace::antenna::{self, DipoleArraySpec, ImportedAntenna, PatternNormalization};
use beamspace::capacity::ChannelConfig;
use beamspace::network::{LoadState, PortNetwork};
use beamspace::optimizer::ReactanceGrid;
use beamspace::waveform::{Polarization, PulseShape};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Mandatory: every stochastic quantity derives from this seed; there are
    /// no wall-clock defaults. `--seed` on the command line overrides it.
    #[serde(default)]
    pub seed: Option<u64>,
    pub antenna: AntennaSource,
    #[serde(default)]
    pub active_port: usize,
    /// Frequencies to analyze; defaults to every sample the antenna carries.
    #[serde(default)]
    pub frequencies: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub loads: Option<LoadsConfig>,
    #[serde(default)]
    pub channel: ChannelSettings,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub waveform: WaveformSettings,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AntennaSource {
    /// Inline analytic three-element dipole array spec.
    Analytic(DipoleArraySpec),
    /// Path to a JSON file with the same fields.
    AnalyticFile(PathBuf),
    /// External S-parameters plus per-port pattern files.
    Imported {
        touchstone: PathBuf,
        patterns: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            n_theta: 64,
            n_phi: 128,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadsConfig {
    /// Named fixture; only "pin_diode" is defined.
    Fixture(String),
    /// Complex pair [[re, im], [re, im]] in ohms.
    Pair([[f64; 2]; 2]),
    /// Purely reactive pair [x1, x2] in ohms.
    Reactive([f64; 2]),
}

impl LoadsConfig {
    pub fn to_load_state(&self) -> Result<LoadState, CliError> {
        match self {
            LoadsConfig::Fixture(name) if name == "pin_diode" => {
                Ok(LoadState::pin_diode_fixture())
            }
            LoadsConfig::Fixture(name) => Err(CliError::Config(format!(
                "unknown load fixture '{name}' (known: pin_diode)"
            ))),
            LoadsConfig::Pair(p) => LoadState::new(vec![
                Complex64::new(p[0][0], p[0][1]),
                Complex64::new(p[1][0], p[1][1]),
            ])
            .map_err(|e| CliError::Config(e.to_string())),
            LoadsConfig::Reactive([x1, x2]) => Ok(LoadState::reactive(*x1, *x2)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelSettings {
    pub snr_db: Vec<f64>,
    pub n_channels: usize,
    pub n_noise: usize,
    /// Replace the antenna-derived transmit correlation with the identity.
    pub ideal: bool,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        ChannelSettings {
            snr_db: vec![10.0, 20.0],
            n_channels: 500,
            n_noise: 100,
            ideal: false,
        }
    }
}

impl ChannelSettings {
    pub fn to_channel_config(&self, snr_db: f64, seed: u64) -> ChannelConfig {
        ChannelConfig {
            snr_db,
            n_channels: self.n_channels,
            n_noise: self.n_noise,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub series_resistance: f64,
    /// Sub-band counts to plan for (the tuning study uses three load pairs).
    pub subband_counts: Vec<usize>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            x_min: -400.0,
            x_max: 400.0,
            n_points: 41,
            series_resistance: 0.0,
            subband_counts: vec![3],
        }
    }
}

impl SweepSettings {
    pub fn to_grid(&self) -> Result<ReactanceGrid, CliError> {
        ReactanceGrid::linspace(self.x_min, self.x_max, self.n_points)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WaveformSettings {
    pub rolloff: f64,
    pub span_symbols: usize,
    pub sps: usize,
    pub symbol_rate_hz: f64,
    pub n_symbols: usize,
    /// Ramp durations as fractions of a symbol period; 0 is rectangular.
    pub ramp_fractions: Vec<f64>,
    /// Observation direction [theta, phi] in degrees.
    pub direction_deg: [f64; 2],
    pub polarization: PolarizationSetting,
    pub band_edge_hz: f64,
    pub segment_len: usize,
    pub overlap_frac: f64,
    pub dump_envelope: bool,
}

impl Default for WaveformSettings {
    fn default() -> Self {
        WaveformSettings {
            rolloff: 0.5,
            span_symbols: 16,
            sps: 16,
            symbol_rate_hz: 5e5,
            n_symbols: 1 << 14,
            ramp_fractions: vec![0.0, 0.1, 0.25, 0.5],
            direction_deg: [90.0, 0.0],
            polarization: PolarizationSetting::Theta,
            band_edge_hz: 5e5,
            segment_len: 4096,
            overlap_frac: 0.5,
            dump_envelope: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationSetting {
    Theta,
    Phi,
}

impl From<PolarizationSetting> for Polarization {
    fn from(p: PolarizationSetting) -> Polarization {
        match p {
            PolarizationSetting::Theta => Polarization::Theta,
            PolarizationSetting::Phi => Polarization::Phi,
        }
    }
}

impl WaveformSettings {
    pub fn pulse_shape(&self) -> PulseShape {
        PulseShape {
            rolloff: self.rolloff,
            span: self.span_symbols,
            sps: self.sps,
        }
    }

    pub fn overlap_samples(&self) -> usize {
        ((self.segment_len as f64) * self.overlap_frac).round() as usize
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Apply the command-line seed override and enforce that a seed exists.
    pub fn resolve_seed(&mut self, cli_seed: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = cli_seed {
            self.seed = Some(s);
        }
        self.seed
            .ok_or_else(|| CliError::Config("a seed is required (config field 'seed' or --seed); wall-clock seeding is not supported".into()))
    }

    /// Build or ingest the antenna described by the config.
    pub fn build_network(&self) -> Result<PortNetwork, CliError> {
        let grid = beamspace::grid::make_grid(self.grid.n_theta, self.grid.n_phi)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let report = |spec: &DipoleArraySpec| -> Result<(), CliError> {
            for w in spec
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?
            {
                eprintln!("warning: {w}");
            }
            Ok(())
        };
        match &self.antenna {
            AntennaSource::Analytic(spec) => {
                report(spec)?;
                antenna::build_network_on(spec, &grid).map_err(|e| CliError::Config(e.to_string()))
            }
            AntennaSource::AnalyticFile(path) => {
                let spec = DipoleArraySpec::from_json_file(path)
                    .map_err(|e| CliError::Ingestion(e.to_string()))?;
                report(&spec)?;
                antenna::build_network_on(&spec, &grid).map_err(|e| CliError::Config(e.to_string()))
            }
            AntennaSource::Imported {
                touchstone,
                patterns,
            } => antenna::load_imported(&ImportedAntenna {
                touchstone_path: touchstone.clone(),
                pattern_paths: patterns.clone(),
                normalization: PatternNormalization::UnitPortCurrentWatts,
            })
            .map_err(|e| CliError::Ingestion(e.to_string())),
        }
    }

    /// The frequency list to operate on: the config subset when present
    /// (validated against the network samples), otherwise every sample.
    pub fn frequency_list(&self, net: &PortNetwork) -> Result<Vec<f64>, CliError> {
        match &self.frequencies {
            None => Ok(net.frequencies()),
            Some(list) => {
                if list.is_empty() {
                    return Err(CliError::Config("frequency list is empty".into()));
                }
                for &f in list {
                    net.entry_near(f)
                        .map_err(|e| CliError::Config(e.to_string()))?;
                }
                Ok(list.clone())
            }
        }
    }

    pub fn loads(&self) -> Result<LoadState, CliError> {
        self.loads
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a 'loads' entry".into()))?
            .to_load_state()
    }
}
