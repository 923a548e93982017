use num_complex::Complex64;

use crate::dft;
use crate::error::{dimension, Result};
use crate::signal::FrameGrid;

use super::ofdm::{add_cyclic_prefix, ofdm_demodulate, strip_cyclic_prefix};

/// Blocks of `m` time-domain symbols, each preceded by its cyclic prefix.
pub fn scfde_modulate(symbols: &[Complex64], m: usize, cp_len: usize) -> Result<Vec<Complex64>> {
    if m == 0 || symbols.len() % m != 0 {
        return dimension(format!("{} symbols do not fill blocks of {m}", symbols.len()));
    }
    if cp_len >= m {
        return crate::error::config(format!("cyclic prefix {cp_len} must be shorter than M = {m}"));
    }
    Ok(add_cyclic_prefix(symbols, m, cp_len))
}

/// Strips the prefixes and moves each block to the frequency domain for equalization.
pub fn scfde_to_frequency(signal: &[Complex64], m: usize, n: usize, cp_len: usize) -> Result<FrameGrid> {
    ofdm_demodulate(signal, m, n, cp_len)
}

pub fn scfde_from_frequency(grid: &FrameGrid) -> Vec<Complex64> {
    let mut v = grid.as_slice().to_vec();
    for col in v.chunks_mut(grid.rows()) {
        dft::ifft(col);
    }
    v
}

/// Symbol estimates over an ideal channel.
pub fn scfde_demodulate(signal: &[Complex64], m: usize, n: usize, cp_len: usize) -> Result<Vec<Complex64>> {
    strip_cyclic_prefix(signal, m, cp_len, n)
}
