//! Cluster/ray tapped delay line for indoor sub-terahertz links.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{config, Result};
use crate::rng::complex_gaussian;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterRayParams {
    pub cluster_rate_per_s: f64,
    pub ray_rate_per_s: f64,
    pub cluster_decay_s: f64,
    pub ray_decay_s: f64,
    /// Arrivals later than this are discarded.
    pub max_delay_s: f64,
    /// Power ratio of the deterministic direct path to the scattered paths; `None` disables it.
    pub k_factor_db: Option<f64>,
}

impl Default for ClusterRayParams {
    fn default() -> Self {
        Self {
            cluster_rate_per_s: 0.13e9,
            ray_rate_per_s: 0.37e9,
            cluster_decay_s: 3.12e-9,
            ray_decay_s: 0.91e-9,
            max_delay_s: 30e-9,
            k_factor_db: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TdlChannel {
    pub taps: Vec<Complex64>,
    pub sample_period_s: f64,
}

impl TdlChannel {
    pub fn new(taps: Vec<Complex64>, sample_period_s: f64) -> Self {
        Self { taps, sample_period_s }
    }

    pub fn identity(sample_period_s: f64) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)], sample_period_s)
    }

    pub fn power(&self) -> f64 {
        self.taps.iter().map(|h| h.norm_sqr()).sum()
    }

    /// Keeps the first `n` taps and restores unit power.
    pub fn truncated(&self, n: usize) -> Self {
        let mut taps: Vec<Complex64> = self.taps.iter().take(n.max(1)).copied().collect();
        let p: f64 = taps.iter().map(|h| h.norm_sqr()).sum();
        if p > 0.0 {
            let s = p.sqrt().recip();
            taps.iter_mut().for_each(|h| *h *= s);
        }
        Self::new(taps, self.sample_period_s)
    }

    /// Response at baseband frequency `f_hz`.
    pub fn response_at(&self, f_hz: f64) -> Complex64 {
        let w = -2.0 * std::f64::consts::PI * f_hz * self.sample_period_s;
        self.taps.iter().enumerate().map(|(l, h)| h * Complex64::from_polar(1.0, w * l as f64)).sum()
    }

    pub fn rms_delay_spread_s(&self) -> f64 {
        let p = self.power();
        if p == 0.0 {
            return 0.0;
        }
        let ts = self.sample_period_s;
        let mean = self.taps.iter().enumerate().map(|(l, h)| h.norm_sqr() * l as f64 * ts).sum::<f64>() / p;
        let second = self.taps.iter().enumerate().map(|(l, h)| h.norm_sqr() * (l as f64 * ts).powi(2)).sum::<f64>() / p;
        (second - mean * mean).max(0.0).sqrt()
    }
}

/// Spreading and molecular-absorption power gain exp(-k d) / d^2.
pub fn large_scale_gain(distance_m: f64, absorption_per_m: f64) -> f64 {
    (-absorption_per_m * distance_m).exp() / (distance_m * distance_m)
}

pub fn generate_cluster_ray_tdl(
    params: &ClusterRayParams,
    sample_period_s: f64,
    rng: &mut impl Rng,
) -> Result<TdlChannel> {
    let p = params;
    if !(p.cluster_rate_per_s > 0.0 && p.ray_rate_per_s > 0.0 && p.cluster_decay_s > 0.0 && p.ray_decay_s > 0.0) {
        return config("cluster/ray rates and decay constants must be positive");
    }
    if !(sample_period_s > 0.0 && p.max_delay_s >= 0.0) {
        return config("sample period must be positive and maximum delay non-negative");
    }
    let taps_len = (p.max_delay_s / sample_period_s).round() as usize + 1;
    if let Some(k) = p.k_factor_db {
        if k == f64::INFINITY {
            return Ok(TdlChannel::identity(sample_period_s));
        }
    }
    let cluster_gap = Exp::new(p.cluster_rate_per_s).expect("positive rate");
    let ray_gap = Exp::new(p.ray_rate_per_s).expect("positive rate");
    let mut taps = vec![Complex64::new(0.0, 0.0); taps_len];
    let mut t_c = 0.0;
    while t_c <= p.max_delay_s {
        let mut tau = 0.0;
        while t_c + tau <= p.max_delay_s {
            let power = (-t_c / p.cluster_decay_s).exp() * (-tau / p.ray_decay_s).exp();
            let idx = ((t_c + tau) / sample_period_s).round() as usize;
            if idx < taps_len {
                taps[idx] += complex_gaussian(rng, power);
            }
            tau += ray_gap.sample(rng);
        }
        t_c += cluster_gap.sample(rng);
    }
    let scattered: f64 = taps.iter().map(|h| h.norm_sqr()).sum();
    let scale = scattered.sqrt().recip();
    taps.iter_mut().for_each(|h| *h *= scale);
    if let Some(kdb) = p.k_factor_db {
        let k = 10f64.powf(kdb / 10.0);
        let s = (1.0 / (k + 1.0)).sqrt();
        taps.iter_mut().for_each(|h| *h *= s);
        taps[0] += Complex64::new((k / (k + 1.0)).sqrt(), 0.0);
    }
    let total: f64 = taps.iter().map(|h| h.norm_sqr()).sum();
    let scale = total.sqrt().recip();
    taps.iter_mut().for_each(|h| *h *= scale);
    while taps.len() > 1 && taps.last().is_some_and(|h| h.norm_sqr() == 0.0) {
        taps.pop();
    }
    Ok(TdlChannel::new(taps, sample_period_s))
}

/// Linear convolution; output length is len(x) + taps - 1.
pub fn tdl_apply(tdl: &TdlChannel, x: &[Complex64]) -> Vec<Complex64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut y = vec![Complex64::new(0.0, 0.0); x.len() + tdl.taps.len() - 1];
    for (l, &h) in tdl.taps.iter().enumerate() {
        for (i, &v) in x.iter().enumerate() {
            y[i + l] += h * v;
        }
    }
    y
}

/// H[k] = sum_l h_l exp(-j 2 pi k l / M) on the M DFT bins.
pub fn tdl_frequency_response(tdl: &TdlChannel, m: usize) -> Result<Vec<Complex64>> {
    if tdl.taps.len() > m {
        return config(format!("{} taps do not fit an {m}-point response", tdl.taps.len()));
    }
    let mut buf = tdl.taps.clone();
    buf.resize(m, Complex64::new(0.0, 0.0));
    crate::dft::fft(&mut buf);
    let s = (m as f64).sqrt();
    Ok(buf.into_iter().map(|v| v * s).collect())
}
