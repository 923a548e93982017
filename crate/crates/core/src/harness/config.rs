//! Experiment files (TOML). Unknown keys are rejected and errors carry the key path.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::equalization::EqualizerKind;
use crate::error::{Error, Result};
use crate::impairments::PhnModel;
use crate::waveforms::{Mapping, Scheme, WaveformParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BerAwgnPhn,
    BerBeamSplit,
    BerDoublySelective,
    PaprCcdf,
    PsdOob,
    KpiTables,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::BerAwgnPhn,
        ExperimentKind::BerBeamSplit,
        ExperimentKind::BerDoublySelective,
        ExperimentKind::PaprCcdf,
        ExperimentKind::PsdOob,
        ExperimentKind::KpiTables,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BerAwgnPhn => "ber_awgn_phn",
            ExperimentKind::BerBeamSplit => "ber_beam_split",
            ExperimentKind::BerDoublySelective => "ber_doubly_selective",
            ExperimentKind::PaprCcdf => "papr_ccdf",
            ExperimentKind::PsdOob => "psd_oob",
            ExperimentKind::KpiTables => "kpi_tables",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentKind::BerAwgnPhn => "BER over AWGN with optional transmitter phase noise",
            ExperimentKind::BerBeamSplit => "BER over a LoS multipath channel with wideband array-gain loss",
            ExperimentKind::BerDoublySelective => "BER over a time-varying multipath channel",
            ExperimentKind::PaprCcdf => "PAPR complementary CDF per waveform",
            ExperimentKind::PsdOob => "two-user PSD and spectral-mask compliance",
            ExperimentKind::KpiTables => "spectral efficiency, latency and complexity",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrDefinition {
    /// Energy per QAM symbol over N0.
    #[default]
    EsN0,
    /// Energy per bit over N0.
    EbN0,
}

/// Inclusive linear sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    #[serde(default = "one")]
    pub step: f64,
}

fn one() -> f64 {
    1.0
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.step <= 0.0 || self.stop < self.start {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Name used in output tables; defaults to the scheme label.
    pub label: Option<String>,
    pub m: usize,
    #[serde(default = "one_usize")]
    pub n: usize,
    #[serde(default)]
    pub cp_len: usize,
    /// DFT-s-OFDM spreading size; defaults to M.
    pub spread_len: Option<usize>,
    #[serde(default)]
    pub mapping: Mapping,
    #[serde(default = "four")]
    pub overlap: usize,
    /// Overrides the phase-noise variance for this entry.
    pub sigma_g2: Option<f64>,
    /// Overrides whether beam split is applied for this entry.
    pub beam_split: Option<bool>,
    /// Overrides the phase-noise model for this entry.
    pub phn_model: Option<PhnModel>,
    /// Overrides the raised-cosine roll-off when pulse shaping is on.
    pub rolloff: Option<f64>,
}

fn one_usize() -> usize {
    1
}

fn four() -> usize {
    4
}

impl SchemeConfig {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.scheme.label().to_string())
    }

    pub fn params(&self, sample_rate_hz: f64) -> WaveformParams {
        WaveformParams::new(self.scheme, self.m, self.n, self.cp_len, sample_rate_hz)
            .with_spread(self.spread_len.unwrap_or(self.m), self.mapping)
            .with_overlap(self.overlap)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    #[serde(default = "thirty_two")]
    pub elements_tx: usize,
    #[serde(default = "thirty_two")]
    pub elements_rx: usize,
    #[serde(default = "thirty")]
    pub steer_angle_deg: f64,
    #[serde(default = "yes")]
    pub enabled: bool,
}

fn thirty_two() -> usize {
    32
}

fn thirty() -> f64 {
    30.0
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Draw a cluster/ray multipath channel per trial; otherwise a single unit tap.
    #[serde(default)]
    pub multipath: bool,
    /// LoS Rician factor; absent means NLoS.
    pub k_factor_db: Option<f64>,
    #[serde(default = "max_delay")]
    pub max_delay_s: f64,
    /// Keep only this many leading taps (renormalized to unit power).
    pub taps: Option<usize>,
    pub cluster_rate_per_ns: Option<f64>,
    pub ray_rate_per_ns: Option<f64>,
    pub cluster_decay_ns: Option<f64>,
    pub ray_decay_ns: Option<f64>,
    pub beam_split: Option<BeamConfig>,
    pub speed_kmh: Option<f64>,
}

fn max_delay() -> f64 {
    30e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseNoiseConfig {
    #[serde(default)]
    pub model: PhnModel,
    /// White phase-noise floor (dBc/Hz); used when `sigma_g2` is absent.
    pub k0_dbc_hz: Option<f64>,
    #[serde(default)]
    pub f_cor_hz: f64,
    pub sigma_g2: Option<f64>,
    pub sigma_w2: Option<f64>,
    /// Remove the per-block common phase with known symbols.
    #[serde(default)]
    pub genie_cpe: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseShapingConfig {
    pub rolloff: f64,
    #[serde(default = "six")]
    pub span: usize,
    #[serde(default = "four")]
    pub oversample: usize,
}

fn six() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaprConfig {
    pub thresholds_db: Sweep,
    pub pulse_shaping: Option<PulseShapingConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsdConfig {
    /// CSV of (offset_hz, level_dbr), relative to the config file.
    pub mask_file: PathBuf,
    #[serde(default = "two")]
    pub users: usize,
    /// Centre spacing between adjacent users; defaults to the bandwidth.
    pub user_spacing_hz: Option<f64>,
    #[serde(default = "four")]
    pub oversample: usize,
    #[serde(default = "segment")]
    pub segment_len: usize,
    #[serde(default = "half")]
    pub overlap: f64,
    /// Subcarrier offset beyond the band edge at which sidelobes are reported.
    #[serde(default = "ten")]
    pub sidelobe_offset: usize,
}

fn two() -> usize {
    2
}

fn segment() -> usize {
    4096
}

fn half() -> f64 {
    0.5
}

fn ten() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Monte Carlo repetitions: frames per SNR point, or frames per scheme.
    #[serde(default = "one_nz")]
    pub trials: NonZeroUsize,
    #[serde(default = "four")]
    pub qam_order: usize,
    pub bandwidth_hz: f64,
    pub carrier_hz: Option<f64>,
    pub snr_db: Option<Sweep>,
    #[serde(default)]
    pub snr_definition: SnrDefinition,
    #[serde(default)]
    pub equalizer: EqualizerKind,
    pub schemes: Vec<SchemeConfig>,
    pub channel: Option<ChannelConfig>,
    pub phase_noise: Option<PhaseNoiseConfig>,
    pub papr: Option<PaprConfig>,
    pub psd: Option<PsdConfig>,
    pub output_dir: Option<PathBuf>,
    /// Directory the file was loaded from; resolves relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one_nz() -> NonZeroUsize {
    NonZeroUsize::MIN
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), msg: msg.into() }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| schema(".", e.message().to_string()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(path, e.into_inner().message().to_string())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Structural checks that serde cannot express.
    fn check(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(schema("bandwidth_hz", "must be positive"));
        }
        if self.schemes.is_empty() && self.kind != ExperimentKind::KpiTables {
            return Err(schema("schemes", "at least one scheme is required"));
        }
        if ![4, 16, 64].contains(&self.qam_order) {
            return Err(schema("qam_order", "must be 4, 16 or 64"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            s.params(self.bandwidth_hz).validate().map_err(|e| schema(format!("schemes[{i}]"), e.to_string()))?;
        }
        let is_ber = matches!(
            self.kind,
            ExperimentKind::BerAwgnPhn | ExperimentKind::BerBeamSplit | ExperimentKind::BerDoublySelective
        );
        if is_ber && self.snr_db.is_none() {
            return Err(schema("snr_db", "BER experiments need an SNR sweep"));
        }
        match self.kind {
            ExperimentKind::PaprCcdf if self.papr.is_none() => Err(schema("papr", "missing [papr] table")),
            ExperimentKind::PsdOob if self.psd.is_none() => Err(schema("psd", "missing [psd] table")),
            ExperimentKind::BerBeamSplit | ExperimentKind::BerDoublySelective if self.carrier_hz.is_none() => {
                Err(schema("carrier_hz", "required for this experiment"))
            }
            ExperimentKind::BerBeamSplit if self.channel.as_ref().and_then(|c| c.beam_split.as_ref()).is_none() => {
                Err(schema("channel.beam_split", "missing beam-split table"))
            }
            ExperimentKind::BerDoublySelective if self.channel.as_ref().and_then(|c| c.speed_kmh).is_none() => {
                Err(schema("channel.speed_kmh", "required for this experiment"))
            }
            _ => Ok(()),
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
