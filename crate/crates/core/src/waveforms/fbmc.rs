//! OQAM/FBMC with a frequency-sampled prototype filter.
//!
//! A frame of N complex QAM columns becomes 2N real half-symbols spaced M/2
//! samples apart. Even subcarriers send the real part first, odd ones the
//! imaginary part first.

use num_complex::Complex64;

use crate::dft;
use crate::error::{config, dimension, Result};
use crate::signal::{Domain, FrameGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeFilter {
    overlap: usize,
    m: usize,
    coeffs: Vec<f64>,
}

impl PrototypeFilter {
    /// Frequency-sample weights psi_0..psi_{O-1}.
    pub fn weights(overlap: usize) -> Result<Vec<f64>> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match overlap {
            2 => Ok(vec![1.0, r]),
            3 => Ok(vec![1.0, 0.911438, 0.411438]),
            4 => Ok(vec![1.0, 0.97195983, r, 0.23514695]),
            _ => config(format!("overlapping factor {overlap} unsupported; use 2, 3 or 4")),
        }
    }

    /// Unscaled samples 1 + 2 sum_o (-1)^o psi_o cos(2 pi o (i + 1) / (O M)).
    pub fn raw(overlap: usize, m: usize) -> Result<Vec<f64>> {
        let psi = Self::weights(overlap)?;
        let len = overlap * m;
        Ok((0..len)
            .map(|i| {
                let mut g = 1.0;
                for (o, &p) in psi.iter().enumerate().skip(1) {
                    let sign = if o % 2 == 0 { 1.0 } else { -1.0 };
                    g += 2.0 * sign * p * (2.0 * std::f64::consts::PI * o as f64 * (i + 1) as f64 / len as f64).cos();
                }
                g
            })
            .collect())
    }

    /// Prototype scaled to unit energy.
    pub fn phydyas(overlap: usize, m: usize) -> Result<Self> {
        if m == 0 || m % 2 != 0 {
            return config(format!("FBMC needs an even number of subcarriers, got {m}"));
        }
        let mut coeffs = Self::raw(overlap, m)?;
        let e: f64 = coeffs.iter().map(|c| c * c).sum();
        let s = e.sqrt().recip();
        for c in &mut coeffs {
            *c *= s;
        }
        Ok(Self { overlap, m, coeffs })
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn subcarriers(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

pub fn fbmc_frame_len(m: usize, n: usize, overlap: usize) -> usize {
    overlap * m + (2 * n - 1) * m / 2
}

/// exp(j pi/2 (m + n)).
pub fn fbmc_phase(m: usize, n: usize) -> Complex64 {
    match (m + n) % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Subcarrier phase that moves the modulation reference to the prototype's
/// symmetry point, which keeps the OQAM inner products real.
fn centre_phase(r: usize, filter: &PrototypeFilter) -> Complex64 {
    let m = filter.subcarriers();
    let h = (filter.len() / 2 - 1) % m;
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((r * h) % m) as f64 / m as f64)
}

/// Splits each QAM symbol into two real half-symbols (M x 2N, column-major).
pub fn fbmc_stagger(grid: &FrameGrid) -> Vec<f64> {
    let (m, n) = (grid.rows(), grid.cols());
    let mut out = vec![0.0; m * 2 * n];
    for k in 0..n {
        for r in 0..m {
            let d = grid.get(r, k);
            let (first, second) = if r % 2 == 0 { (d.re, d.im) } else { (d.im, d.re) };
            out[r + 2 * k * m] = first;
            out[r + (2 * k + 1) * m] = second;
        }
    }
    out
}

/// Real parts of the analysis outputs, recombined into QAM symbols.
pub fn fbmc_combine(analysis: &FrameGrid) -> Result<FrameGrid> {
    let (m, cols) = (analysis.rows(), analysis.cols());
    if cols % 2 != 0 {
        return dimension("analysis grid needs an even number of half-symbol columns");
    }
    let mut out = FrameGrid::zeros(m, cols / 2, Domain::TimeFrequency);
    for k in 0..cols / 2 {
        for r in 0..m {
            let a = analysis.get(r, 2 * k).re;
            let b = analysis.get(r, 2 * k + 1).re;
            let d = if r % 2 == 0 { Complex64::new(a, b) } else { Complex64::new(b, a) };
            out.set(r, k, d);
        }
    }
    Ok(out)
}

/// Synthesis filter bank over real half-symbols `a` (M x half_symbols, column-major).
pub fn fbmc_synthesize(a: &[f64], half_symbols: usize, filter: &PrototypeFilter) -> Result<Vec<Complex64>> {
    let m = filter.subcarriers();
    if a.len() != m * half_symbols {
        return dimension(format!("{} real symbols for {m} x {half_symbols}", a.len()));
    }
    let p = filter.coeffs();
    let len = p.len() + half_symbols.saturating_sub(1) * m / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let gain = (m as f64).sqrt();
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    for n in 0..half_symbols {
        for (r, v) in c.iter_mut().enumerate() {
            *v = fbmc_phase(r, n) * centre_phase(r, filter) * a[r + n * m];
        }
        dft::ifft(&mut c);
        let start = n * m / 2;
        for (t, &pt) in p.iter().enumerate() {
            out[start + t] += c[t % m] * (pt * gain);
        }
    }
    Ok(out)
}

pub fn fbmc_modulate(grid: &FrameGrid, filter: &PrototypeFilter) -> Result<Vec<Complex64>> {
    if grid.rows() != filter.subcarriers() {
        return dimension(format!("grid has {} rows, filter expects {}", grid.rows(), filter.subcarriers()));
    }
    fbmc_synthesize(&fbmc_stagger(grid), 2 * grid.cols(), filter)
}

/// Matched-filter outputs with the OQAM phase removed (M x half_symbols, complex).
///
/// The real part of an entry is the transmitted real symbol plus residual
/// interference; the imaginary part carries the intrinsic interference.
pub fn fbmc_analyze(signal: &[Complex64], half_symbols: usize, filter: &PrototypeFilter) -> Result<FrameGrid> {
    let m = filter.subcarriers();
    let p = filter.coeffs();
    let expect = p.len() + half_symbols.saturating_sub(1) * m / 2;
    if signal.len() < expect {
        return dimension(format!("expected at least {expect} samples, got {}", signal.len()));
    }
    let mut grid = FrameGrid::zeros(m, half_symbols, Domain::TimeFrequency);
    let gain = (m as f64).sqrt();
    let mut fold = vec![Complex64::new(0.0, 0.0); m];
    for n in 0..half_symbols {
        fold.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let seg = &signal[n * m / 2..n * m / 2 + p.len()];
        for (t, (&x, &pt)) in seg.iter().zip(p).enumerate() {
            fold[t % m] += x * pt;
        }
        dft::fft(&mut fold);
        let col = grid.column_mut(n);
        for (r, v) in col.iter_mut().enumerate() {
            *v = fold[r] * gain * (fbmc_phase(r, n) * centre_phase(r, filter)).conj();
        }
    }
    Ok(grid)
}

pub fn fbmc_demodulate(signal: &[Complex64], n: usize, filter: &PrototypeFilter) -> Result<FrameGrid> {
    fbmc_combine(&fbmc_analyze(signal, 2 * n, filter)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prototype_shape() {
        let m = 16;
        for o in [2usize, 3, 4] {
            let g = PrototypeFilter::raw(o, m).unwrap();
            let l = o * m;
            let c = l / 2 - 1;
            for j in 0..=c {
                assert!((g[c + j] - g[c - j]).abs() < 1e-12);
            }
            let (imax, _) = g.iter().enumerate().fold((0, f64::MIN), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
            assert_eq!(imax, c);
            if o > 2 {
                assert!(g[l - 1].abs() < 1e-6);
            }
        }
        assert!(PrototypeFilter::phydyas(5, 16).is_err());
        assert!(PrototypeFilter::phydyas(4, 15).is_err());
    }

    #[test]
    fn reconstruction_sir() {
        for (m, n) in [(16usize, 4usize), (64, 8)] {
            let f = PrototypeFilter::phydyas(4, m).unwrap();
            let mut g = FrameGrid::zeros(m, n, Domain::TimeFrequency);
            for k in 0..n {
                for r in 0..m {
                    let v = ((r * 7 + k * 3) % 5) as f64 - 2.0;
                    let w = ((r * 3 + k * 5) % 3) as f64 - 1.0;
                    g.set(r, k, Complex64::new(v, w));
                }
            }
            let y = fbmc_demodulate(&fbmc_modulate(&g, &f).unwrap(), n, &f).unwrap();
            let s: f64 = g.as_slice().iter().map(|v| v.norm_sqr()).sum();
            let e: f64 = g.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
            let sir = 10.0 * (s / e).log10();
            assert!(sir >= 55.0, "M={m}: {sir:.1} dB");
        }
    }

    #[test]
    fn single_symbol_energy() {
        let f = PrototypeFilter::phydyas(4, 8).unwrap();
        let mut g = FrameGrid::zeros(8, 2, Domain::TimeFrequency);
        g.set(3, 1, Complex64::new(0.7, 0.0));
        let x = fbmc_modulate(&g, &f).unwrap();
        assert_eq!(x.len(), fbmc_frame_len(8, 2, 4));
        let e: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!((e - 0.49).abs() < 1e-9);
    }
}
