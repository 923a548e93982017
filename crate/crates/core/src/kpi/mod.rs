//! Key performance indicators: PAPR, spectrum, efficiency, latency, complexity, BER.

mod ber;
mod efficiency;
mod papr;
mod psd;

pub use ber::{ber_aggregate, BerCounter};
pub use efficiency::{complexity, e2e_latency_s, fft_mults, spectral_efficiency, ComplexityReport};
pub use papr::{ccdf, papr, papr_ccdf_theory, papr_db, papr_max_otfs_db, papr_quantile_db, papr_window, CcdfCurve};
pub use psd::{oob_check, psd_welch, MaskReport, Psd, SpectralMask};
