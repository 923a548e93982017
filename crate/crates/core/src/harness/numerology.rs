//! Feasibility of a numerology for a given channel.

use std::fmt;

use crate::waveforms::{Scheme, WaveformParams};

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStats {
    pub tau_rms_s: f64,
    pub tau_max_s: f64,
    pub nu_max_hz: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumerologyReport {
    pub coherence_bandwidth_hz: f64,
    pub coherence_time_s: f64,
    pub checks: Vec<Check>,
}

impl NumerologyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.pass)
    }
}

impl fmt::Display for NumerologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coherence bandwidth {:.4e} Hz, coherence time {:.4e} s", self.coherence_bandwidth_hz, self.coherence_time_s)?;
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// B_coh = 1 / (5 tau_rms).
pub fn coherence_bandwidth_hz(tau_rms_s: f64) -> f64 {
    1.0 / (5.0 * tau_rms_s)
}

/// T_coh = sqrt(9 / (16 pi nu^2)).
pub fn coherence_time_s(nu_max_hz: f64) -> f64 {
    (9.0 / (16.0 * std::f64::consts::PI * nu_max_hz * nu_max_hz)).sqrt()
}

/// Headroom demanded by "T_u much shorter than T_coh".
pub const COHERENCE_MARGIN: f64 = 10.0;

/// Checks tau_rms <= T_CP <= T_u << T_coh and nu_max < Δf < 1/tau_max.
pub fn validate_numerology(p: &WaveformParams, ch: &ChannelStats) -> NumerologyReport {
    let fs = p.sample_rate_hz;
    let t_cp = p.cp_len as f64 / fs;
    let t_u = p.m as f64 / fs;
    let df = 1.0 / t_u;
    let t_coh = coherence_time_s(ch.nu_max_hz);
    let mut checks = vec![
        Check {
            name: "cyclic prefix covers delay spread",
            pass: ch.tau_rms_s <= t_cp,
            detail: format!("tau_rms = {:.4e} s, T_CP = {t_cp:.4e} s", ch.tau_rms_s),
        },
        Check {
            name: "cyclic prefix shorter than symbol",
            pass: t_cp <= t_u,
            detail: format!("T_CP = {t_cp:.4e} s, T_u = {t_u:.4e} s"),
        },
        Check {
            name: "symbol within coherence time",
            pass: t_u * COHERENCE_MARGIN <= t_coh,
            detail: format!("T_u = {t_u:.4e} s, T_coh = {t_coh:.4e} s (margin x{COHERENCE_MARGIN})"),
        },
        Check {
            name: "ν_max < Δf < 1/τ_max",
            pass: ch.nu_max_hz < df && (ch.tau_max_s <= 0.0 || df < 1.0 / ch.tau_max_s),
            detail: format!("nu_max = {:.4e} Hz, Δf = {df:.4e} Hz, 1/τ_max = {:.4e} Hz", ch.nu_max_hz, 1.0 / ch.tau_max_s),
        },
    ];
    if p.scheme == Scheme::Fbmc {
        // no cyclic prefix to size
        checks.drain(..2);
    }
    NumerologyReport { coherence_bandwidth_hz: coherence_bandwidth_hz(ch.tau_rms_s), coherence_time_s: t_coh, checks }
}
