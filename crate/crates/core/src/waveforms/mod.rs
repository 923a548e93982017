//! Modulators and demodulators for the five compared waveforms.

mod dfts;
mod fbmc;
mod ofdm;
mod otfs;
mod scfde;
mod shaping;

pub use dfts::{dfts_demodulate, dfts_despread, dfts_modulate, dfts_spread, subcarrier_map};
pub use fbmc::{
    fbmc_analyze, fbmc_combine, fbmc_demodulate, fbmc_frame_len, fbmc_modulate, fbmc_phase, fbmc_stagger,
    fbmc_synthesize, PrototypeFilter,
};
pub use ofdm::{add_cyclic_prefix, ofdm_demodulate, ofdm_modulate, strip_cyclic_prefix};
pub use otfs::{dd_to_time, otfs_demodulate, otfs_modulate, time_to_dd};
pub use scfde::{scfde_demodulate, scfde_from_frequency, scfde_modulate, scfde_to_frequency};
pub use shaping::{apply_pulse_shaping, raised_cosine_kernel};

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CpOfdm,
    ScFde,
    DftsOfdm,
    Fbmc,
    Otfs,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::CpOfdm, Scheme::ScFde, Scheme::DftsOfdm, Scheme::Fbmc, Scheme::Otfs];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::CpOfdm => "CP-OFDM",
            Scheme::ScFde => "SC-FDE",
            Scheme::DftsOfdm => "DFT-s-OFDM",
            Scheme::Fbmc => "OQAM/FBMC",
            Scheme::Otfs => "OTFS",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    #[default]
    Localized,
    Distributed,
}

/// Numerology of one waveform instance.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveformParams {
    pub scheme: Scheme,
    /// Subcarriers (block length for SC-FDE, delay bins for OTFS).
    pub m: usize,
    /// Symbols per frame (Doppler bins for OTFS).
    pub n: usize,
    /// Cyclic prefix per block, or per frame for OTFS.
    pub cp_len: usize,
    /// DFT spreading size for DFT-s-OFDM.
    pub spread_len: usize,
    pub mapping: Mapping,
    /// Prototype overlapping factor for FBMC.
    pub overlap: usize,
    pub sample_rate_hz: f64,
}

impl WaveformParams {
    pub fn new(scheme: Scheme, m: usize, n: usize, cp_len: usize, sample_rate_hz: f64) -> Self {
        Self { scheme, m, n, cp_len, spread_len: m, mapping: Mapping::Localized, overlap: 4, sample_rate_hz }
    }

    pub fn with_spread(mut self, spread_len: usize, mapping: Mapping) -> Self {
        self.spread_len = spread_len;
        self.mapping = mapping;
        self
    }

    pub fn with_overlap(mut self, overlap: usize) -> Self {
        self.overlap = overlap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return config("M and N must be positive");
        }
        if !(self.sample_rate_hz > 0.0) {
            return config("sample rate must be positive");
        }
        match self.scheme {
            Scheme::CpOfdm | Scheme::ScFde | Scheme::DftsOfdm => {
                if self.cp_len >= self.m {
                    return config(format!("cyclic prefix {} must be shorter than M = {}", self.cp_len, self.m));
                }
            }
            Scheme::Otfs => {
                if self.cp_len >= self.m * self.n {
                    return config("cyclic prefix must be shorter than the OTFS frame");
                }
            }
            Scheme::Fbmc => {
                if self.cp_len != 0 {
                    return config("FBMC carries no cyclic prefix; set cp_len = 0");
                }
                if self.m % 2 != 0 {
                    return config("FBMC needs an even number of subcarriers");
                }
                PrototypeFilter::weights(self.overlap)?;
            }
        }
        if self.scheme == Scheme::DftsOfdm {
            subcarrier_map(self.m, self.spread_len, self.mapping)?;
        }
        Ok(())
    }

    /// QAM symbols carried by one frame.
    pub fn symbols_per_frame(&self) -> usize {
        match self.scheme {
            Scheme::DftsOfdm => self.spread_len * self.n,
            _ => self.m * self.n,
        }
    }

    /// Transmitted samples per frame.
    pub fn frame_len(&self) -> usize {
        match self.scheme {
            Scheme::CpOfdm | Scheme::ScFde | Scheme::DftsOfdm => self.n * (self.m + self.cp_len),
            Scheme::Otfs => self.m * self.n + self.cp_len,
            Scheme::Fbmc => fbmc_frame_len(self.m, self.n, self.overlap),
        }
    }
}
