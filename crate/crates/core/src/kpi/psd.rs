use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::dft;
use crate::error::{config, Result};

/// Two-sided power spectral density, bins sorted by frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct Psd {
    pub freqs_hz: Vec<f64>,
    /// Power per Hz (linear).
    pub density: Vec<f64>,
    pub bin_width_hz: f64,
}

impl Psd {
    pub fn db(&self) -> Vec<f64> {
        self.density.iter().map(|&p| 10.0 * p.max(1e-300).log10()).collect()
    }

    /// Integral of the density over all bins.
    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width_hz
    }

    /// Density at the bin nearest `freq_hz`.
    pub fn at(&self, freq_hz: f64) -> f64 {
        let i = self.freqs_hz.partition_point(|&f| f < freq_hz);
        let i = match i {
            0 => 0,
            i if i == self.freqs_hz.len() => i - 1,
            i if freq_hz - self.freqs_hz[i - 1] < self.freqs_hz[i] - freq_hz => i - 1,
            i => i,
        };
        self.density[i]
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }
}

/// Welch averaged periodogram with a Hann window.
pub fn psd_welch(signal: &[Complex64], sample_rate_hz: f64, segment_len: usize, overlap_frac: f64) -> Result<Psd> {
    if segment_len < 2 || segment_len > signal.len() {
        return config(format!("segment length {segment_len} must be in 2..={}", signal.len()));
    }
    if !(0.0..1.0).contains(&overlap_frac) || !(sample_rate_hz > 0.0) {
        return config("overlap must be in [0, 1) and sample rate positive");
    }
    let hop = ((segment_len as f64 * (1.0 - overlap_frac)).round() as usize).max(1);
    let window: Vec<f64> = (0..segment_len)
        .map(|i| {
            let s = (std::f64::consts::PI * i as f64 / segment_len as f64).sin();
            s * s
        })
        .collect();
    let wpow: f64 = window.iter().map(|w| w * w).sum();
    let mut acc = vec![0.0; segment_len];
    let mut segments = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    let mut start = 0;
    while start + segment_len <= signal.len() {
        for ((b, &x), &w) in buf.iter_mut().zip(&signal[start..start + segment_len]).zip(&window) {
            *b = x * w;
        }
        // unitary transform: |X|^2 sums to the windowed energy
        dft::fft(&mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b.norm_sqr());
        segments += 1;
        start += hop;
    }
    let df = sample_rate_hz / segment_len as f64;
    // sum(density) * df equals mean power for stationary input
    let scale = 1.0 / (segments as f64 * wpow * df);
    let half = segment_len / 2;
    let order: Vec<usize> = (0..segment_len).map(|i| (i + segment_len - half) % segment_len).collect();
    let freqs_hz = (0..segment_len).map(|i| (i as f64 - half as f64) * df).collect();
    let density = order.iter().map(|&k| acc[k] * scale).collect();
    Ok(Psd { freqs_hz, density, bin_width_hz: df })
}

/// Piecewise-linear mask in dB relative to the in-band peak.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMask {
    breakpoints: Vec<(f64, f64)>,
    symmetric: bool,
}

#[derive(Deserialize)]
struct MaskRow {
    offset_hz: f64,
    level_dbr: f64,
}

impl SpectralMask {
    /// With `symmetric`, offsets are non-negative and mirrored about the centre.
    pub fn new(breakpoints: Vec<(f64, f64)>, symmetric: bool) -> Result<Self> {
        if breakpoints.len() < 2 {
            return config("a spectral mask needs at least two breakpoints");
        }
        if breakpoints.windows(2).any(|w| w[1].0 < w[0].0) {
            return config("mask offsets must be sorted");
        }
        if symmetric && breakpoints[0].0 != 0.0 {
            return config("symmetric masks start at offset 0");
        }
        Ok(Self { breakpoints, symmetric })
    }

    /// Reads `offset_hz,level_dbr` rows.
    pub fn from_csv(path: impl AsRef<Path>, symmetric: bool) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut pts = Vec::new();
        for row in rdr.deserialize() {
            let r: MaskRow = row?;
            pts.push((r.offset_hz, r.level_dbr));
        }
        Self::new(pts, symmetric)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Mask level at an offset from the centre, `None` outside the defined span.
    pub fn level_at(&self, offset_hz: f64) -> Option<f64> {
        let x = if self.symmetric { offset_hz.abs() } else { offset_hz };
        let bp = &self.breakpoints;
        if x < bp[0].0 || x > bp[bp.len() - 1].0 {
            return None;
        }
        let i = bp.partition_point(|p| p.0 <= x);
        if i == bp.len() {
            return Some(bp[i - 1].1);
        }
        let (a, b) = (bp[i - 1], bp[i]);
        if b.0 == a.0 {
            return Some(b.1);
        }
        Some(a.1 + (x - a.0) / (b.0 - a.0) * (b.1 - a.1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskReport {
    /// Smallest mask-minus-PSD margin over all bins (dB).
    pub worst_margin_db: f64,
    pub worst_freq_hz: f64,
    /// Bins above the mask as (frequency, margin).
    pub violations: Vec<(f64, f64)>,
}

impl MaskReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Rounding slack when a PSD sits exactly on the mask.
const MARGIN_TOL_DB: f64 = 1e-9;

/// Compares a PSD, normalized to its peak, against a mask centred at `center_hz`.
pub fn oob_check(psd: &Psd, mask: &SpectralMask, center_hz: f64) -> Result<MaskReport> {
    let db = psd.db();
    let peak = db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut report = MaskReport { worst_margin_db: f64::INFINITY, worst_freq_hz: center_hz, violations: Vec::new() };
    for (&f, &p) in psd.freqs_hz.iter().zip(&db) {
        let Some(level) = mask.level_at(f - center_hz) else {
            return config(format!("mask does not cover PSD bin at {:.6e} Hz offset", f - center_hz));
        };
        let margin = level - (p - peak);
        if margin < report.worst_margin_db {
            report.worst_margin_db = margin;
            report.worst_freq_hz = f;
        }
        if margin < -MARGIN_TOL_DB {
            report.violations.push((f, margin));
        }
    }
    Ok(report)
}
