use crate::error::{config, Result};
use crate::waveforms::{Scheme, WaveformParams};

/// Bits per transmitted sample relative to the modulation order.
pub fn spectral_efficiency(p: &WaveformParams) -> f64 {
    let (m, n, cp) = (p.m as f64, p.n as f64, p.cp_len as f64);
    match p.scheme {
        Scheme::CpOfdm | Scheme::ScFde => m / (m + cp),
        Scheme::DftsOfdm => p.spread_len as f64 / (m + cp),
        Scheme::Fbmc => n / (n + p.overlap as f64 - 0.5),
        Scheme::Otfs => m / (m + cp / n),
    }
}

/// Time to transmit one frame.
pub fn e2e_latency_s(p: &WaveformParams) -> f64 {
    let (m, n, cp) = (p.m as f64, p.n as f64, p.cp_len as f64);
    let samples = match p.scheme {
        Scheme::CpOfdm | Scheme::ScFde | Scheme::DftsOfdm => n * (m + cp),
        Scheme::Fbmc => m * (n + p.overlap as f64 - 0.5),
        Scheme::Otfs => n * m + cp,
    };
    samples / p.sample_rate_hz
}

/// Real multiplications of a split-radix FFT of size `n`.
pub fn fft_mults(n: usize) -> Result<f64> {
    if n < 2 || !n.is_power_of_two() {
        return config(format!("FFT size {n} must be a power of two and at least 2"));
    }
    let nf = n as f64;
    Ok(nf * (nf.log2() - 3.0) + 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityReport {
    pub per_symbol_real_mults: f64,
    pub per_second_real_mults: f64,
}

/// Real multiplications per symbol and per second.
pub fn complexity(p: &WaveformParams) -> Result<ComplexityReport> {
    let (m, n, cp, fs) = (p.m as f64, p.n as f64, p.cp_len as f64, p.sample_rate_hz);
    let c_m = fft_mults(p.m)?;
    let (sym, rate) = match p.scheme {
        Scheme::CpOfdm | Scheme::ScFde => {
            let c = c_m + 4.0 * (m + cp);
            (c, c * fs / (m + cp))
        }
        Scheme::DftsOfdm => {
            let c = c_m + fft_mults(p.spread_len)? + 4.0 * (m + cp);
            (c, c * fs / (m + cp))
        }
        Scheme::Fbmc => {
            let o = p.overlap as f64;
            let c = 2.0 * c_m + 4.0 * o * m + 4.0 * m;
            (c, n * c * fs / (m * (n + o - 0.5)))
        }
        Scheme::Otfs => {
            let c = fft_mults(p.n)? + 4.0 * (n + cp / m);
            (c, m * c * fs / (n * m + cp))
        }
    };
    Ok(ComplexityReport { per_symbol_real_mults: sym, per_second_real_mults: rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let ofdm = WaveformParams::new(Scheme::CpOfdm, 256, 32, 48, 10e9);
        assert!((spectral_efficiency(&ofdm) - 256.0 / 304.0).abs() < 1e-15);
        assert!((e2e_latency_s(&ofdm) - 972.8e-9).abs() < 1e-18);
        let otfs = WaveformParams { scheme: Scheme::Otfs, ..ofdm.clone() };
        assert!((e2e_latency_s(&otfs) - 824e-9).abs() < 1e-18);
        assert!((spectral_efficiency(&otfs) - 256.0 / 257.5).abs() < 1e-15);
        assert_eq!(fft_mults(256).unwrap(), 1284.0);
        assert_eq!(fft_mults(2).unwrap(), 0.0);
        assert!(fft_mults(1).is_err() && fft_mults(48).is_err());
        let fbmc = WaveformParams::new(Scheme::Fbmc, 256, 32, 0, 10e9);
        assert_eq!(complexity(&fbmc).unwrap().per_symbol_real_mults, 7688.0);
        let long = WaveformParams::new(Scheme::Fbmc, 256, 1_000_000, 0, 10e9);
        assert!(spectral_efficiency(&long) >= 0.999996);
    }
}
