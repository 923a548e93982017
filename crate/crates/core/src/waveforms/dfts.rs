use num_complex::Complex64;

use crate::dft;
use crate::error::{config, dimension, Result};
use crate::signal::{Domain, FrameGrid};

use super::ofdm::{ofdm_demodulate, ofdm_modulate};
use super::Mapping;

/// Subcarriers occupied by the `mbar` spread outputs.
pub fn subcarrier_map(m: usize, mbar: usize, mapping: Mapping) -> Result<Vec<usize>> {
    if mbar == 0 || mbar > m {
        return config(format!("spreading size {mbar} must lie in 1..={m}"));
    }
    match mapping {
        Mapping::Localized => Ok((0..mbar).collect()),
        Mapping::Distributed => {
            if m % mbar != 0 {
                return config(format!("distributed mapping needs M = {m} divisible by {mbar}"));
            }
            Ok((0..mbar).map(|k| k * (m / mbar)).collect())
        }
    }
}

/// DFT-spreads consecutive groups of `mbar` symbols onto columns of an M-row grid.
pub fn dfts_spread(symbols: &[Complex64], m: usize, mbar: usize, mapping: Mapping) -> Result<FrameGrid> {
    let map = subcarrier_map(m, mbar, mapping)?;
    if symbols.len() % mbar != 0 {
        return dimension(format!("{} symbols do not fill blocks of {mbar}", symbols.len()));
    }
    let n = symbols.len() / mbar;
    let mut grid = FrameGrid::zeros(m, n, Domain::TimeFrequency);
    for (col, chunk) in symbols.chunks(mbar).enumerate() {
        let spread = dft::fft_vec(chunk);
        let dst = grid.column_mut(col);
        for (&k, v) in map.iter().zip(spread) {
            dst[k] = v;
        }
    }
    Ok(grid)
}

pub fn dfts_despread(grid: &FrameGrid, mbar: usize, mapping: Mapping) -> Result<Vec<Complex64>> {
    let map = subcarrier_map(grid.rows(), mbar, mapping)?;
    let mut out = Vec::with_capacity(mbar * grid.cols());
    for col in 0..grid.cols() {
        let c = grid.column(col);
        let mut v: Vec<Complex64> = map.iter().map(|&k| c[k]).collect();
        dft::ifft(&mut v);
        out.extend(v);
    }
    Ok(out)
}

pub fn dfts_modulate(
    symbols: &[Complex64],
    m: usize,
    mbar: usize,
    mapping: Mapping,
    cp_len: usize,
) -> Result<Vec<Complex64>> {
    ofdm_modulate(&dfts_spread(symbols, m, mbar, mapping)?, cp_len)
}

pub fn dfts_demodulate(
    signal: &[Complex64],
    m: usize,
    n: usize,
    mbar: usize,
    mapping: Mapping,
    cp_len: usize,
) -> Result<Vec<Complex64>> {
    dfts_despread(&ofdm_demodulate(signal, m, n, cp_len)?, mbar, mapping)
}
