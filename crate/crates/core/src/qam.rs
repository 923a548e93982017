//! Square Gray-labelled QAM with unit average energy.

use num_complex::Complex64;

use crate::error::{config, dimension, Result};

#[derive(Clone, Debug)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
}

/// Amplitude for a Gray label on one axis; label 0 sits at the largest positive level.
fn pam_level(label: usize, bits: usize) -> f64 {
    let mut idx = label;
    let mut shift = 1;
    while shift < bits {
        idx ^= idx >> shift;
        shift <<= 1;
    }
    let levels = 1usize << bits;
    (levels as f64 - 1.0) - 2.0 * idx as f64
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64) {
            return config(format!("unsupported QAM order {order}; expected 4, 16 or 64"));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let half = bits_per_symbol / 2;
        let mask = (1usize << half) - 1;
        let mut points: Vec<Complex64> = (0..order)
            .map(|s| Complex64::new(pam_level(s >> half, half), pam_level(s & mask, half)))
            .collect();
        let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
        let scale = mean.sqrt().recip();
        for p in &mut points {
            *p *= scale;
        }
        Ok(Self { order, bits_per_symbol, points })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Maps bits (MSB first within each symbol) to points.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol;
        if bits.len() % k != 0 {
            return dimension(format!("{} bits is not a multiple of {k}", bits.len()));
        }
        Ok(bits
            .chunks(k)
            .map(|c| self.points[c.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)])
            .collect())
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn nearest(&self, y: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn demodulate(&self, symbols: &[Complex64]) -> Vec<u8> {
        let k = self.bits_per_symbol;
        let mut bits = Vec::with_capacity(symbols.len() * k);
        for &y in symbols {
            let s = self.nearest(y);
            for b in (0..k).rev() {
                bits.push(((s >> b) & 1) as u8);
            }
        }
        bits
    }

    pub fn decide(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        symbols.iter().map(|&y| self.points[self.nearest(y)]).collect()
    }
}
