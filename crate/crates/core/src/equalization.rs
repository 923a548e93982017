//! Linear ZF and MMSE equalizers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::DdEffectiveChannel;
use crate::dft;
use crate::error::{config, dimension, Error, Result};
use crate::linalg::{regularized_least_squares, CMatrix};
use crate::signal::FrameGrid;
use crate::waveforms::{dd_to_time, time_to_dd};

/// Gains below this magnitude make zero-forcing undefined.
pub const ZF_MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualizerKind {
    Zf,
    #[default]
    Mmse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EqualizerSpec {
    pub kind: EqualizerKind,
    pub noise_variance: f64,
    pub signal_power: f64,
}

impl EqualizerSpec {
    pub fn zf() -> Self {
        Self { kind: EqualizerKind::Zf, noise_variance: 0.0, signal_power: 1.0 }
    }

    pub fn mmse(noise_variance: f64) -> Self {
        Self { kind: EqualizerKind::Mmse, noise_variance, signal_power: 1.0 }
    }

    pub fn new(kind: EqualizerKind, noise_variance: f64) -> Self {
        Self { kind, noise_variance, signal_power: 1.0 }
    }

    fn regularization(&self) -> Result<f64> {
        if !(self.noise_variance >= 0.0 && self.signal_power > 0.0) {
            return config("noise variance must be non-negative and signal power positive");
        }
        Ok(match self.kind {
            EqualizerKind::Zf => 0.0,
            EqualizerKind::Mmse => self.noise_variance / self.signal_power,
        })
    }
}

/// Per-bin y/h (ZF) or h* y / (|h|^2 + sigma^2/P) (MMSE).
pub fn single_tap_equalize(y: &[Complex64], h: &[Complex64], spec: &EqualizerSpec) -> Result<Vec<Complex64>> {
    if y.len() != h.len() {
        return dimension(format!("{} observations vs {} channel gains", y.len(), h.len()));
    }
    let reg = spec.regularization()?;
    y.iter()
        .zip(h)
        .enumerate()
        .map(|(k, (&yk, &hk))| match spec.kind {
            EqualizerKind::Zf => {
                if hk.norm() < ZF_MIN_GAIN {
                    Err(Error::Singular(format!("zero-forcing on null channel gain at bin {k}")))
                } else {
                    Ok(yk / hk)
                }
            }
            EqualizerKind::Mmse => Ok(hk.conj() * yk / (hk.norm_sqr() + reg)),
        })
        .collect()
}

/// ZF/MMSE on y = H x + n through a QR factorization.
pub fn matrix_equalize(y: &[Complex64], h: &CMatrix, spec: &EqualizerSpec) -> Result<Vec<Complex64>> {
    regularized_least_squares(h, y, spec.regularization()?)
}

/// Channel descriptions accepted by [`otfs_equalize`].
#[derive(Clone, Copy, Debug)]
pub enum OtfsChannel<'a> {
    /// Sparse delay-Doppler paths; solved through the banded time-domain normal equations.
    Paths(&'a DdEffectiveChannel),
    /// Time-invariant channel given by its response on the MN bins of the frame.
    Circulant(&'a [Complex64]),
    /// Explicit delay-Doppler domain matrix.
    Dense(&'a CMatrix),
}

/// Linear equalization of a received delay-Doppler frame.
///
/// The delay-Doppler transform is unitary, so ZF/MMSE in the time domain gives
/// the same estimate as in the delay-Doppler domain.
pub fn otfs_equalize(y_dd: &FrameGrid, channel: OtfsChannel<'_>, spec: &EqualizerSpec) -> Result<FrameGrid> {
    let (m, n) = (y_dd.rows(), y_dd.cols());
    match channel {
        OtfsChannel::Paths(eff) => {
            let ch = eff.channel();
            if ch.m() != m || ch.n() != n {
                return dimension(format!("grid {m}x{n} vs channel {}x{}", ch.m(), ch.n()));
            }
            let y = dd_to_time(y_dd);
            let rhs = ch.apply_adjoint(&y)?;
            let x = ch.gram(spec.regularization()?).solve_hpd(&rhs)?;
            time_to_dd(&x, m, n)
        }
        OtfsChannel::Circulant(h) => {
            let mut y = dd_to_time(y_dd);
            dft::fft(&mut y);
            let mut x = single_tap_equalize(&y, h, spec)?;
            dft::ifft(&mut x);
            time_to_dd(&x, m, n)
        }
        OtfsChannel::Dense(h) => {
            let x = matrix_equalize(y_dd.as_slice(), h, spec)?;
            FrameGrid::from_vec(m, n, y_dd.domain(), x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tap_rules() {
        let y = [Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)];
        let h = [Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)];
        let z = single_tap_equalize(&y, &h, &EqualizerSpec::zf()).unwrap();
        assert!((z[0] - Complex64::new(1.0, -1.0)).norm() < 1e-15);
        let m = single_tap_equalize(&y, &h, &EqualizerSpec::mmse(1.0)).unwrap();
        assert!((m[1] - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        let err = single_tap_equalize(&y, &[h[0], Complex64::new(0.0, 0.0)], &EqualizerSpec::zf()).unwrap_err();
        assert!(err.to_string().contains("bin 1"));
        assert!(single_tap_equalize(&y[..1], &h, &EqualizerSpec::zf()).is_err());
    }
}
