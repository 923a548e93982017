use num_complex::Complex64;

use crate::dft;
use crate::error::{config, dimension, Result};
use crate::signal::{Domain, FrameGrid};

use super::ofdm::{add_cyclic_prefix, strip_cyclic_prefix};

/// vec(D F_N^H): inverse DFT along the Doppler axis of every delay row.
pub fn dd_to_time(grid: &FrameGrid) -> Vec<Complex64> {
    let (m, n) = (grid.rows(), grid.cols());
    let mut out = grid.as_slice().to_vec();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..m {
        for (k, v) in row.iter_mut().enumerate() {
            *v = grid.get(r, k);
        }
        dft::ifft(&mut row);
        for (k, v) in row.iter().enumerate() {
            out[r + k * m] = *v;
        }
    }
    out
}

/// Inverse of [`dd_to_time`]: reshape column-major and right-multiply by F_N.
pub fn time_to_dd(x: &[Complex64], m: usize, n: usize) -> Result<FrameGrid> {
    if x.len() != m * n {
        return dimension(format!("expected {} samples, got {}", m * n, x.len()));
    }
    let mut out = x.to_vec();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..m {
        for (k, v) in row.iter_mut().enumerate() {
            *v = x[r + k * m];
        }
        dft::fft(&mut row);
        for (k, v) in row.iter().enumerate() {
            out[r + k * m] = *v;
        }
    }
    FrameGrid::from_vec(m, n, Domain::DelayDoppler, out)
}

/// One cyclic prefix for the whole frame.
pub fn otfs_modulate(grid: &FrameGrid, cp_len: usize) -> Result<Vec<Complex64>> {
    let len = grid.rows() * grid.cols();
    if cp_len >= len {
        return config(format!("cyclic prefix {cp_len} must be shorter than the frame ({len})"));
    }
    Ok(add_cyclic_prefix(&dd_to_time(grid), len, cp_len))
}

pub fn otfs_demodulate(signal: &[Complex64], m: usize, n: usize, cp_len: usize) -> Result<FrameGrid> {
    time_to_dd(&strip_cyclic_prefix(signal, m * n, cp_len, 1)?, m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_two_by_two() {
        let g = FrameGrid::from_vec(2, 2, Domain::DelayDoppler, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        let x = otfs_modulate(&g, 0).unwrap();
        let r = 2f64.sqrt();
        let expect = [r, r, 0.0, 0.0];
        for (v, e) in x.iter().zip(expect) {
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_with_prefix() {
        let data: Vec<Complex64> = (0..32).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let g = FrameGrid::from_vec(8, 4, Domain::DelayDoppler, data).unwrap();
        let x = otfs_modulate(&g, 5).unwrap();
        assert_eq!(x.len(), 37);
        let back = otfs_demodulate(&x, 8, 4, 5).unwrap();
        for (a, b) in back.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
