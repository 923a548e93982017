//! Sample buffers and the two-dimensional resource grids that waveforms map onto.

use num_complex::Complex64;

use crate::error::{dimension, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        Self { samples, sample_rate_hz }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }
}

pub fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|s| s.norm_sqr()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    TimeFrequency,
    DelayDoppler,
}

/// M x N grid stored column-major: element (m, n) lives at `m + n * M`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameGrid {
    rows: usize,
    cols: usize,
    domain: Domain,
    data: Vec<Complex64>,
}

impl FrameGrid {
    pub fn zeros(rows: usize, cols: usize, domain: Domain) -> Self {
        Self { rows, cols, domain, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, domain: Domain, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return dimension(format!(
                "grid {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, domain, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m + n * self.rows]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Complex64) {
        self.data[m + n * self.rows] = v;
    }

    pub fn column(&self, n: usize) -> &[Complex64] {
        &self.data[n * self.rows..(n + 1) * self.rows]
    }

    pub fn column_mut(&mut self, n: usize) -> &mut [Complex64] {
        &mut self.data[n * self.rows..(n + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }
}

pub fn vectorize(grid: &FrameGrid) -> Vec<Complex64> {
    grid.as_slice().to_vec()
}

pub fn devectorize(v: &[Complex64], rows: usize, cols: usize, domain: Domain) -> Result<FrameGrid> {
    FrameGrid::from_vec(rows, cols, domain, v.to_vec())
}

/// Regular time-frequency (or delay-Doppler) lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub m: usize,
    pub n: usize,
    pub subcarrier_spacing_hz: f64,
    /// Symbol duration without cyclic prefix.
    pub symbol_period_s: f64,
}

impl LatticeSpec {
    /// Critically sampled lattice for a Nyquist-rate bandwidth split into `m` subcarriers.
    pub fn critical(m: usize, n: usize, bandwidth_hz: f64) -> Self {
        let df = bandwidth_hz / m as f64;
        Self { m, n, subcarrier_spacing_hz: df, symbol_period_s: 1.0 / df }
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.m as f64 * self.subcarrier_spacing_hz
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.bandwidth_hz()
    }
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Maximum Doppler shift v * fc / c.
pub fn max_doppler_hz(speed_mps: f64, carrier_hz: f64) -> f64 {
    speed_mps * carrier_hz / SPEED_OF_LIGHT
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorize_is_column_major() {
        let data: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let g = FrameGrid::from_vec(2, 3, Domain::TimeFrequency, data.clone()).unwrap();
        assert_eq!(g.get(1, 0).re, 1.0);
        assert_eq!(g.get(0, 1).re, 2.0);
        assert_eq!(vectorize(&g), data);
        let back = devectorize(&data, 2, 3, Domain::TimeFrequency).unwrap();
        assert_eq!(back, g);
        assert!(devectorize(&data, 4, 2, Domain::DelayDoppler).is_err());
    }

    #[test]
    fn doppler_at_half_terahertz() {
        let nu = max_doppler_hz(kmh_to_mps(500.0), 0.5e12);
        assert!((nu - 231_642.5).abs() < 1.0, "{nu}");
    }
}
