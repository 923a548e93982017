use num_complex::Complex64;

use crate::error::{config, Result};
use crate::signal::ComplexSignal;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Raised-cosine taps over `span` symbols at `oversample` samples per symbol, unit energy.
pub fn raised_cosine_kernel(rolloff: f64, span: usize, oversample: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rolloff) {
        return config(format!("roll-off {rolloff} outside [0, 1]"));
    }
    if span == 0 || oversample == 0 {
        return config("span and oversampling factor must be positive");
    }
    let half = (span * oversample / 2) as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|k| {
            let x = k as f64 / oversample as f64;
            let denom = 1.0 - 4.0 * rolloff * rolloff * x * x;
            if rolloff > 0.0 && denom.abs() < 1e-10 {
                std::f64::consts::FRAC_PI_4 * sinc(1.0 / (2.0 * rolloff))
            } else {
                sinc(x) * (std::f64::consts::PI * rolloff * x).cos() / denom
            }
        })
        .collect();
    let e: f64 = taps.iter().map(|t| t * t).sum();
    let s = e.sqrt().recip();
    taps.iter_mut().for_each(|t| *t *= s);
    Ok(taps)
}

/// Zero-stuffs by `oversample` and filters with the raised-cosine kernel (full convolution).
pub fn apply_pulse_shaping(
    signal: &ComplexSignal,
    rolloff: f64,
    span: usize,
    oversample: usize,
) -> Result<ComplexSignal> {
    let h = raised_cosine_kernel(rolloff, span, oversample)?;
    let len = signal.len() * oversample + h.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, &x) in signal.samples.iter().enumerate() {
        let base = i * oversample;
        for (k, &t) in h.iter().enumerate() {
            out[base + k] += x * t;
        }
    }
    Ok(ComplexSignal::new(out, signal.sample_rate_hz * oversample as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_properties() {
        for a in [0.0, 0.22, 0.5, 1.0] {
            let h = raised_cosine_kernel(a, 6, 4).unwrap();
            assert_eq!(h.len(), 25);
            let e: f64 = h.iter().map(|t| t * t).sum();
            assert!((e - 1.0).abs() < 1e-9);
            assert!(h.iter().all(|t| t.is_finite()));
            // zero crossings at nonzero symbol instants
            for k in [4usize, 8, 16, 20] {
                assert!(h[k].abs() < 1e-12, "alpha {a} tap {k} = {}", h[k]);
            }
        }
        assert!(raised_cosine_kernel(1.2, 6, 4).is_err());
        assert!(raised_cosine_kernel(-0.1, 6, 4).is_err());
    }

    #[test]
    fn singular_point_uses_the_limit() {
        // alpha = 0.4 puts t = 1.25 T on the removable singularity.
        let h = raised_cosine_kernel(0.4, 6, 4).unwrap();
        let x: f64 = 1.25 + 1e-7;
        let near = sinc(x) * (std::f64::consts::PI * 0.4 * x).cos() / (1.0 - 4.0 * 0.16 * x * x);
        assert!((h[17] / h[12] - near).abs() < 1e-5);
    }
}
