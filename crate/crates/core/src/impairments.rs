//! Oscillator phase noise.
//!
//! The uncorrelated part has per-sample variance K0/T and the Wiener part
//! increments with variance 4 pi^2 K2 T, where T = 1/B and K2 = f_cor K0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, dimension, Result};
use crate::rng::{std_normal, Purpose, RandomStream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhnModel {
    #[default]
    Gaussian,
    Wiener,
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhnParams {
    pub model: PhnModel,
    /// Per-sample variance of the uncorrelated component (rad^2).
    pub sigma_g2: f64,
    /// Per-sample increment variance of the Wiener component (rad^2).
    pub sigma_w2: f64,
}

/// Largest N (f_cor / B)^2 for which the Wiener part can be dropped.
pub const GAUSSIAN_MODEL_LIMIT: f64 = std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI);

impl PhnParams {
    pub fn new(model: PhnModel, sigma_g2: f64, sigma_w2: f64) -> Result<Self> {
        if !(sigma_g2 >= 0.0 && sigma_w2 >= 0.0) {
            return config("phase-noise variances must be non-negative");
        }
        Ok(Self { model, sigma_g2, sigma_w2 })
    }

    /// From the noise floor (dBc/Hz), corner frequency and sampling bandwidth.
    pub fn from_oscillator(model: PhnModel, k0_dbc_hz: f64, f_cor_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        if !(bandwidth_hz > 0.0 && f_cor_hz >= 0.0) {
            return config("bandwidth must be positive and corner frequency non-negative");
        }
        let k0 = 10f64.powf(k0_dbc_hz / 10.0);
        let k2 = f_cor_hz * k0;
        let t = 1.0 / bandwidth_hz;
        Self::new(model, k0 / t, 4.0 * std::f64::consts::PI.powi(2) * k2 * t)
    }
}

/// N (f_cor / B)^2, compared against [`GAUSSIAN_MODEL_LIMIT`].
pub fn model_selection_metric(samples: usize, f_cor_hz: f64, bandwidth_hz: f64) -> f64 {
    samples as f64 * (f_cor_hz / bandwidth_hz).powi(2)
}

pub fn gaussian_model_suffices(samples: usize, f_cor_hz: f64, bandwidth_hz: f64) -> bool {
    model_selection_metric(samples, f_cor_hz, bandwidth_hz) <= GAUSSIAN_MODEL_LIMIT
}

/// Phase sequence in radians. The Gaussian and Wiener parts come from separate
/// sub-streams, so the combined model is their exact sum.
pub fn phn_generate(params: &PhnParams, samples: usize, stream: &RandomStream, side: Side) -> Vec<f64> {
    let (pg, pw) = match side {
        Side::Tx => (Purpose::PhaseGaussian, Purpose::PhaseWiener),
        Side::Rx => (Purpose::RxPhaseGaussian, Purpose::RxPhaseWiener),
    };
    let mut phi = vec![0.0; samples];
    if matches!(params.model, PhnModel::Gaussian | PhnModel::Combined) && params.sigma_g2 > 0.0 {
        let mut rng = stream.rng(pg);
        let s = params.sigma_g2.sqrt();
        phi.iter_mut().for_each(|p| *p += s * std_normal(&mut rng));
    }
    if matches!(params.model, PhnModel::Wiener | PhnModel::Combined) && params.sigma_w2 > 0.0 {
        let mut rng = stream.rng(pw);
        let s = params.sigma_w2.sqrt();
        let mut acc = 0.0;
        for (u, p) in phi.iter_mut().enumerate() {
            if u > 0 {
                acc += s * std_normal(&mut rng);
            }
            *p += acc;
        }
    }
    phi
}

/// Rotates each sample by its phase.
pub fn phn_apply(signal: &[Complex64], phases: &[f64]) -> Result<Vec<Complex64>> {
    if signal.len() != phases.len() {
        return dimension(format!("{} samples vs {} phases", signal.len(), phases.len()));
    }
    Ok(signal
        .iter()
        .zip(phases)
        .map(|(&x, &p)| if p == 0.0 { x } else { x * Complex64::from_polar(1.0, p) })
        .collect())
}

/// De-rotates a block by its common phase relative to known reference symbols.
pub fn remove_common_phase(block: &mut [Complex64], reference: &[Complex64]) {
    let c: Complex64 = block.iter().zip(reference).map(|(y, r)| y * r.conj()).sum();
    if c.norm() > 0.0 {
        let rot = (c / c.norm()).conj();
        block.iter_mut().for_each(|y| *y *= rot);
    }
}
