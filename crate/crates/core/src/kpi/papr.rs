use num_complex::Complex64;

use crate::error::{config, Result};
use crate::waveforms::Scheme;

/// PAPR of the first `window` samples.
pub fn papr_window(signal: &[Complex64], window: usize) -> Result<f64> {
    if window > signal.len() {
        return config(format!("observation window {window} exceeds signal length {}", signal.len()));
    }
    papr(&signal[..window])
}

/// Peak over mean power of one observation window (linear).
pub fn papr(window: &[Complex64]) -> Result<f64> {
    if window.is_empty() {
        return config("empty observation window");
    }
    let mut peak = 0.0f64;
    let mut sum = 0.0;
    for v in window {
        let p = v.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return config("zero-energy observation window");
    }
    Ok(peak / (sum / window.len() as f64))
}

pub fn papr_db(window: &[Complex64]) -> Result<f64> {
    Ok(10.0 * papr(window)?.log10())
}

/// Probability of PAPR exceeding each threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CcdfCurve {
    /// Smallest threshold whose probability drops to `prob` or below, linearly
    /// interpolated in dB between grid points.
    pub fn threshold_at(&self, prob: f64) -> Option<f64> {
        let (t, p) = (&self.thresholds_db, &self.probabilities);
        let i = p.iter().position(|&v| v <= prob)?;
        if i == 0 || p[i] == p[i - 1] {
            return Some(t[i]);
        }
        let w = (p[i - 1] - prob) / (p[i - 1] - p[i]);
        Some(t[i - 1] + w * (t[i] - t[i - 1]))
    }
}

/// Empirical CCDF: fraction of samples strictly above each threshold.
pub fn ccdf(samples_db: &[f64], thresholds_db: &[f64]) -> CcdfCurve {
    let mut sorted = samples_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    let probabilities = thresholds_db
        .iter()
        .map(|&t| {
            let below = sorted.partition_point(|&v| v <= t);
            (sorted.len() - below) as f64 / n
        })
        .collect();
    CcdfCurve { thresholds_db: thresholds_db.to_vec(), probabilities }
}

/// Threshold exceeded by a fraction `prob` of the samples.
pub fn papr_quantile_db(samples_db: &[f64], prob: f64) -> f64 {
    let mut sorted = samples_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let above = ((prob * n as f64).floor() as usize).min(n - 1);
    sorted[n - 1 - above]
}

/// Largest PAPR a unit-modulus OTFS frame can reach.
pub fn papr_max_otfs_db(n: usize) -> f64 {
    10.0 * (n as f64).log10()
}

/// Closed-form CCDF: 1 - (1 - exp(-gamma))^K with K = M (CP-OFDM) or MN (OTFS, capped at N).
pub fn papr_ccdf_theory(scheme: Scheme, m: usize, n: usize, thresholds_db: &[f64]) -> Result<CcdfCurve> {
    let (exponent, cap) = match scheme {
        Scheme::CpOfdm => (m as f64, f64::INFINITY),
        Scheme::Otfs => ((m * n) as f64, n as f64),
        other => return config(format!("no closed-form PAPR distribution for {}", other.label())),
    };
    let probabilities = thresholds_db
        .iter()
        .map(|&t| {
            let g = 10f64.powf(t / 10.0);
            if g >= cap {
                0.0
            } else {
                // 1 - (1 - e^-g)^K, evaluated without cancellation
                -(exponent * (-(-g).exp()).ln_1p()).exp_m1()
            }
        })
        .collect();
    Ok(CcdfCurve { thresholds_db: thresholds_db.to_vec(), probabilities })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_windows() {
        let x = vec![Complex64::new(1.0, 0.0); 8];
        assert!((papr(&x).unwrap() - 1.0).abs() < 1e-15);
        let mut y = vec![Complex64::new(0.0, 0.0); 4];
        y[0] = Complex64::new(2.0, 0.0);
        assert!((papr(&y).unwrap() - 4.0).abs() < 1e-15);
        assert!(papr(&[Complex64::new(0.0, 0.0); 3]).is_err());
        assert!(papr(&[]).is_err());
    }

    #[test]
    fn theory_endpoints() {
        let p = papr_ccdf_theory(Scheme::CpOfdm, 64, 1, &[-100.0, 0.0, 30.0]).unwrap().probabilities;
        let half = papr_ccdf_theory(Scheme::CpOfdm, 1, 1, &[10.0 * std::f64::consts::LN_2.log10()]).unwrap();
        assert!((half.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[2] < 1e-100);
        let q = papr_ccdf_theory(Scheme::Otfs, 8, 4, &[6.03]).unwrap();
        assert_eq!(q.probabilities[0], 0.0);
        assert!((papr_max_otfs_db(4) - 6.0206).abs() < 1e-4);
        assert!(papr_ccdf_theory(Scheme::Fbmc, 8, 4, &[1.0]).is_err());
    }

    #[test]
    fn empirical_ccdf() {
        let s = [1.0, 2.0, 3.0, 4.0];
        let c = ccdf(&s, &[0.0, 2.0, 4.0]);
        assert_eq!(c.probabilities, vec![1.0, 0.5, 0.0]);
        assert_eq!(c.threshold_at(0.75), Some(1.0));
        assert_eq!(papr_quantile_db(&s, 0.25), 3.0);
    }
}
