use num_complex::Complex64;

use crate::dft;
use crate::error::{config, dimension, Result};
use crate::signal::{Domain, FrameGrid};

/// Prepends the last `cp_len` samples of each `block`-long chunk.
pub fn add_cyclic_prefix(payload: &[Complex64], block: usize, cp_len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(payload.len() / block * (block + cp_len));
    for b in payload.chunks(block) {
        out.extend_from_slice(&b[block - cp_len..]);
        out.extend_from_slice(b);
    }
    out
}

pub fn strip_cyclic_prefix(signal: &[Complex64], block: usize, cp_len: usize, blocks: usize) -> Result<Vec<Complex64>> {
    if signal.len() != blocks * (block + cp_len) {
        return dimension(format!(
            "expected {blocks} blocks of {} samples ({} total), got {}",
            block + cp_len,
            blocks * (block + cp_len),
            signal.len()
        ));
    }
    Ok(signal.chunks(block + cp_len).flat_map(|c| c[cp_len..].iter().copied()).collect())
}

/// Unitary IDFT per column of a TF grid, each preceded by its cyclic prefix.
pub fn ofdm_modulate(grid: &FrameGrid, cp_len: usize) -> Result<Vec<Complex64>> {
    let m = grid.rows();
    if cp_len >= m {
        return config(format!("cyclic prefix {cp_len} must be shorter than M = {m}"));
    }
    let mut payload = grid.as_slice().to_vec();
    for col in payload.chunks_mut(m) {
        dft::ifft(col);
    }
    Ok(add_cyclic_prefix(&payload, m, cp_len))
}

pub fn ofdm_demodulate(signal: &[Complex64], m: usize, n: usize, cp_len: usize) -> Result<FrameGrid> {
    if cp_len >= m {
        return config(format!("cyclic prefix {cp_len} must be shorter than M = {m}"));
    }
    let mut payload = strip_cyclic_prefix(signal, m, cp_len, n)?;
    for col in payload.chunks_mut(m) {
        dft::fft(col);
    }
    FrameGrid::from_vec(m, n, Domain::TimeFrequency, payload)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_subcarrier_is_constant() {
        let mut g = FrameGrid::zeros(4, 1, Domain::TimeFrequency);
        g.set(0, 0, Complex64::new(1.0, 0.0));
        let x = ofdm_modulate(&g, 1).unwrap();
        assert_eq!(x.len(), 5);
        for v in x {
            assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn roundtrip_and_errors() {
        let data: Vec<Complex64> = (0..24).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let g = FrameGrid::from_vec(8, 3, Domain::TimeFrequency, data).unwrap();
        let x = ofdm_modulate(&g, 2).unwrap();
        assert_eq!(x.len(), 30);
        let back = ofdm_demodulate(&x, 8, 3, 2).unwrap();
        for (a, b) in back.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(ofdm_modulate(&g, 8).is_err());
        assert!(ofdm_demodulate(&x[1..], 8, 3, 2).is_err());
    }
}
