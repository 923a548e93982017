//! Array-gain loss across a wide band when phase shifters are tuned at the carrier.

use crate::dft::bin_frequencies;
use crate::error::{config, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BeamSplitParams {
    pub elements_tx: usize,
    pub elements_rx: usize,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub steer_angle_rad: f64,
}

impl BeamSplitParams {
    pub fn validate(&self) -> Result<()> {
        if self.elements_tx == 0 || self.elements_rx == 0 {
            return config("arrays need at least one element");
        }
        if !(self.carrier_hz > 0.0 && self.bandwidth_hz > 0.0 && self.bandwidth_hz < 2.0 * self.carrier_hz) {
            return config("carrier and bandwidth must be positive with B < 2 fc");
        }
        Ok(())
    }

    /// Combined transmit and receive amplitude at baseband frequency `f_hz`.
    pub fn amplitude_at(&self, f_hz: f64) -> f64 {
        let ratio = (self.carrier_hz + f_hz) / self.carrier_hz;
        let s = self.steer_angle_rad.sin();
        array_factor(self.elements_tx, s, ratio) * array_factor(self.elements_rx, s, ratio)
    }
}

/// Normalized response a(theta, f)^H w(theta, fc) / Q of a half-wavelength ULA
/// (element spacing fixed at the carrier), referenced to the array centre.
pub fn array_factor(elements: usize, sin_theta: f64, freq_ratio: f64) -> f64 {
    let q = elements as f64;
    let psi = std::f64::consts::PI * sin_theta * (freq_ratio - 1.0);
    (0..elements).map(|i| ((i as f64 - (q - 1.0) / 2.0) * psi).cos()).sum::<f64>() / q
}

/// Power gain g_tx[m] g_rx[m] on the M DFT bins (bin 0 at the carrier).
pub fn beam_split_gain(params: &BeamSplitParams, m: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if m == 0 {
        return config("need at least one subcarrier");
    }
    Ok(bin_frequencies(m, params.bandwidth_hz).into_iter().map(|f| params.amplitude_at(f).powi(2)).collect())
}
