//! Monte Carlo drivers for each experiment kind.
//!
//! Every trial draws from its own stream keyed by (experiment, point, trial), so
//! results do not depend on scheduling. Schemes in one experiment share streams.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ChannelConfig, ExperimentConfig, ExperimentKind, SchemeConfig, SnrDefinition};
use super::link::{Csi, Link};
use crate::channels::{awgn_add, dd_from_mobility, generate_cluster_ray_tdl, BeamSplitParams, ClusterRayParams, DdChannel, TdlChannel};
use crate::equalization::EqualizerSpec;
use crate::error::{config, Result};
use crate::impairments::{phn_apply, phn_generate, PhnParams, Side};
use crate::kpi::{
    ber_aggregate, complexity, e2e_latency_s, oob_check, papr_db, psd_welch, spectral_efficiency, BerCounter,
    ComplexityReport, MaskReport, Psd, SpectralMask,
};
use crate::rng::{random_bits, Purpose, RandomStream};
use crate::signal::{kmh_to_mps, max_doppler_hz, ComplexSignal, LatticeSpec};
use crate::waveforms::{apply_pulse_shaping, Scheme};

#[derive(Clone, Debug, PartialEq)]
pub struct BerRow {
    pub scheme: String,
    pub snr_db: f64,
    pub counter: BerCounter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaprSamples {
    pub scheme: String,
    pub samples_db: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PsdResult {
    pub scheme: String,
    /// All users together.
    pub composite: Psd,
    /// First user alone, centred at 0 Hz.
    pub user: Psd,
    pub mask: MaskReport,
    /// Level relative to the user's peak a fixed number of subcarriers past the band edge.
    pub sidelobe_dbr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KpiRow {
    pub scheme: String,
    pub spectral_efficiency: f64,
    pub latency_s: f64,
    pub complexity: ComplexityReport,
}

fn links(cfg: &ExperimentConfig) -> Result<Vec<(String, Link)>> {
    cfg.schemes
        .iter()
        .map(|s| Ok((s.label(), Link::new(s.params(cfg.bandwidth_hz), cfg.qam_order)?)))
        .collect()
}

fn random_symbols(link: &Link, stream: &RandomStream, purpose: Purpose) -> Result<(Vec<u8>, Vec<Complex64>)> {
    let bits = random_bits(&mut stream.rng(purpose), link.bits_per_frame());
    let symbols = link.qam.modulate(&bits)?;
    Ok((bits, symbols))
}

fn phase_noise(cfg: &ExperimentConfig, entry: &SchemeConfig) -> Result<Option<PhnParams>> {
    let Some(pn) = &cfg.phase_noise else { return Ok(None) };
    let from_osc = match pn.k0_dbc_hz {
        Some(k0) => Some(PhnParams::from_oscillator(pn.model, k0, pn.f_cor_hz, cfg.bandwidth_hz)?),
        None => None,
    };
    let g = entry.sigma_g2.or(pn.sigma_g2).or(from_osc.map(|p| p.sigma_g2));
    let w = pn.sigma_w2.or(from_osc.map(|p| p.sigma_w2));
    if g.is_none() && w.is_none() {
        return config("phase noise needs k0_dbc_hz or explicit variances");
    }
    Ok(Some(PhnParams::new(entry.phn_model.unwrap_or(pn.model), g.unwrap_or(0.0), w.unwrap_or(0.0))?))
}

fn cluster_params(ch: &ChannelConfig) -> ClusterRayParams {
    let d = ClusterRayParams::default();
    ClusterRayParams {
        cluster_rate_per_s: ch.cluster_rate_per_ns.map_or(d.cluster_rate_per_s, |v| v * 1e9),
        ray_rate_per_s: ch.ray_rate_per_ns.map_or(d.ray_rate_per_s, |v| v * 1e9),
        cluster_decay_s: ch.cluster_decay_ns.map_or(d.cluster_decay_s, |v| v * 1e-9),
        ray_decay_s: ch.ray_decay_ns.map_or(d.ray_decay_s, |v| v * 1e-9),
        max_delay_s: ch.max_delay_s,
        k_factor_db: ch.k_factor_db,
    }
}

/// Number of leading taps kept so every CP scheme stays inter-block-interference free.
fn tap_budget(cfg: &ExperimentConfig) -> Result<Option<usize>> {
    let cps: Vec<usize> = cfg.schemes.iter().filter(|s| s.scheme != Scheme::Fbmc).map(|s| s.cp_len).collect();
    let budget = match cfg.channel.as_ref().and_then(|c| c.taps) {
        Some(t) => Some(t),
        None => cps.iter().min().map(|c| c + 1),
    };
    if let Some(t) = budget {
        if t == 0 {
            return config("channel.taps must be positive");
        }
        if let Some(c) = cps.iter().find(|&&c| t > c + 1) {
            return config(format!("{t} channel taps exceed cyclic prefix {c} + 1"));
        }
    }
    Ok(budget)
}

fn draw_tdl(cfg: &ExperimentConfig, stream: &RandomStream, taps: Option<usize>) -> Result<TdlChannel> {
    let ts = 1.0 / cfg.bandwidth_hz;
    match &cfg.channel {
        Some(ch) if ch.multipath => {
            let tdl = generate_cluster_ray_tdl(&cluster_params(ch), ts, &mut stream.rng(Purpose::Channel))?;
            Ok(match taps {
                Some(t) if t < tdl.taps.len() => tdl.truncated(t),
                _ => tdl,
            })
        }
        _ => Ok(TdlChannel::identity(ts)),
    }
}

fn noise_variance(cfg: &ExperimentConfig, snr_db: f64, bits_per_symbol: usize) -> f64 {
    let snr = 10f64.powf(snr_db / 10.0);
    match cfg.snr_definition {
        SnrDefinition::EsN0 => 1.0 / snr,
        SnrDefinition::EbN0 => 1.0 / (snr * bits_per_symbol as f64),
    }
}

/// Rejects mobility that breaks the lattice before any trial runs.
fn check_mobility(cfg: &ExperimentConfig) -> Result<()> {
    let (Some(ch), Some(fc)) = (&cfg.channel, cfg.carrier_hz) else { return Ok(()) };
    let Some(v) = ch.speed_kmh else { return Ok(()) };
    let nu = max_doppler_hz(kmh_to_mps(v), fc);
    for s in &cfg.schemes {
        let df = cfg.bandwidth_hz / s.m as f64;
        if nu >= df {
            return config(format!(
                "{}: maximum Doppler {nu:.1} Hz violates ν_max < Δf < 1/τ_max (Δf = {df:.1} Hz)",
                s.label()
            ));
        }
        if s.scheme == Scheme::Fbmc {
            return config("FBMC is not supported over time-varying channels");
        }
    }
    Ok(())
}

struct BerJob {
    scheme: usize,
    point: usize,
    trial: usize,
}

fn ber_trial(
    cfg: &ExperimentConfig,
    entry: &SchemeConfig,
    link: &Link,
    snr_db: f64,
    stream: &RandomStream,
    taps: Option<usize>,
) -> Result<BerCounter> {
    let p = &link.params;
    let (bits, symbols) = random_symbols(link, stream, Purpose::Bits)?;
    let mut tx = link.transmit(&symbols)?;
    if let Some(pn) = phase_noise(cfg, entry)? {
        tx = phn_apply(&tx, &phn_generate(&pn, tx.len(), stream, Side::Tx))?;
    }
    let sigma2 = noise_variance(cfg, snr_db, link.qam.bits_per_symbol());
    let eq = EqualizerSpec::new(cfg.equalizer, sigma2);
    let genie = cfg.phase_noise.as_ref().filter(|pn| pn.genie_cpe).map(|_| symbols.as_slice());
    let tdl = draw_tdl(cfg, stream, taps)?;
    let ch_cfg = cfg.channel.as_ref();

    let est = if cfg.kind == ExperimentKind::BerDoublySelective {
        let v = kmh_to_mps(ch_cfg.and_then(|c| c.speed_kmh).unwrap_or(0.0));
        let lattice = LatticeSpec::critical(p.m, p.n, cfg.bandwidth_hz);
        let fc = cfg.carrier_hz.unwrap_or(0.0);
        let dd: DdChannel = dd_from_mobility(&tdl, v, fc, &lattice, &mut stream.rng(Purpose::Doppler))?;
        let origin = p.cp_len;
        let rx = awgn_add(&dd.apply_linear(&tx, origin), sigma2, &mut stream.rng(Purpose::Noise))?;
        link.receive(&rx, &Csi::Doubly(&dd, origin), &eq, genie)?
    } else {
        let beam = match (ch_cfg.and_then(|c| c.beam_split.as_ref()), cfg.carrier_hz) {
            (Some(b), Some(fc)) if entry.beam_split.unwrap_or(b.enabled) => Some(BeamSplitParams {
                elements_tx: b.elements_tx,
                elements_rx: b.elements_rx,
                carrier_hz: fc,
                bandwidth_hz: cfg.bandwidth_hz,
                steer_angle_rad: b.steer_angle_deg.to_radians(),
            }),
            _ => None,
        };
        if let Some(b) = &beam {
            b.validate()?;
        }
        let flat = beam.is_none() && tdl.taps.len() == 1 && tdl.taps[0] == Complex64::new(1.0, 0.0);
        if flat {
            let rx = awgn_add(&tx, sigma2, &mut stream.rng(Purpose::Noise))?;
            link.receive(&rx, &Csi::Flat, &eq, genie)?
        } else {
            let bw = cfg.bandwidth_hz;
            let h = move |f: f64| {
                let g = beam.as_ref().map_or(1.0, |b| b.amplitude_at(f * bw));
                tdl.response_at(f * bw) * g
            };
            let rx = awgn_add(&link.apply_lti(&tx, &h)?, sigma2, &mut stream.rng(Purpose::Noise))?;
            link.receive(&rx, &Csi::Frequency(&h), &eq, genie)?
        }
    };
    Ok(BerCounter::count(&bits, &link.qam.demodulate(&est)))
}

/// BER per scheme and SNR point, pooled over trials.
pub fn run_ber(cfg: &ExperimentConfig) -> Result<Vec<BerRow>> {
    let snrs = cfg.snr_db.map(|s| s.points()).unwrap_or_default();
    let links = links(cfg)?;
    check_mobility(cfg)?;
    let taps = tap_budget(cfg)?;
    let trials = cfg.trials.get();
    let jobs: Vec<BerJob> = (0..links.len())
        .flat_map(|scheme| {
            (0..snrs.len()).flat_map(move |point| (0..trials).map(move |trial| BerJob { scheme, point, trial }))
        })
        .collect();
    let counts = jobs
        .par_iter()
        .map(|j| {
            let stream = RandomStream::for_trial(cfg.seed, &cfg.name, j.point, j.trial);
            ber_trial(cfg, &cfg.schemes[j.scheme], &links[j.scheme].1, snrs[j.point], &stream, taps)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (chunk, first) in counts.chunks(trials).zip(jobs.iter().step_by(trials)) {
        rows.push(BerRow {
            scheme: links[first.scheme].0.clone(),
            snr_db: snrs[first.point],
            counter: ber_aggregate(chunk)?,
        });
    }
    Ok(rows)
}

/// Sample ranges over which one PAPR value is measured.
pub fn papr_windows(link: &Link, frame_len: usize) -> Result<Vec<(usize, usize)>> {
    let p = &link.params;
    let spans: Vec<(usize, usize)> = match p.scheme {
        Scheme::Otfs => vec![(0, frame_len)],
        Scheme::Fbmc => {
            // non-overlapping prototype-length windows where every pulse overlaps fully
            let (w, start, stop) = (p.overlap * p.m, p.overlap * p.m - p.m / 2, p.n * p.m);
            (0..).map(|i| start + i * w).take_while(|s| s + w <= stop).map(|s| (s, s + w)).collect()
        }
        _ => (0..p.n).map(|i| (i * (p.m + p.cp_len), (i + 1) * (p.m + p.cp_len))).collect(),
    };
    if spans.is_empty() {
        return config(format!("frame of {} symbols is too short for a PAPR window", p.n));
    }
    Ok(spans)
}

/// PAPR samples (dB) per scheme, one per observation window.
pub fn run_papr(cfg: &ExperimentConfig) -> Result<Vec<PaprSamples>> {
    let links = links(cfg)?;
    let shaping = cfg.papr.as_ref().and_then(|p| p.pulse_shaping.clone());
    let mut out = Vec::new();
    for ((label, link), entry) in links.iter().zip(&cfg.schemes) {
        let rolloff = entry.rolloff;
        let len = link.params.frame_len();
        let windows = papr_windows(link, len)?;
        let per_trial = (0..cfg.trials.get())
            .into_par_iter()
            .map(|t| {
                let stream = RandomStream::for_trial(cfg.seed, &cfg.name, 0, t);
                let (_, symbols) = random_symbols(link, &stream, Purpose::Bits)?;
                let tx = link.transmit(&symbols)?;
                let (x, os, delay) = match &shaping {
                    Some(ps) => {
                        let a = rolloff.unwrap_or(ps.rolloff);
                        let y = apply_pulse_shaping(&ComplexSignal::new(tx, cfg.bandwidth_hz), a, ps.span, ps.oversample)?;
                        (y.samples, ps.oversample, ps.span * ps.oversample / 2)
                    }
                    None => (tx, 1, 0),
                };
                windows.iter().map(|&(a, b)| papr_db(&x[delay + a * os..delay + b * os])).collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(PaprSamples { scheme: label.clone(), samples_db: per_trial.concat() });
    }
    Ok(out)
}

/// Two-user spectrum per scheme and mask compliance of the first user.
pub fn run_psd(cfg: &ExperimentConfig) -> Result<Vec<PsdResult>> {
    let pc = cfg.psd.as_ref().expect("validated psd table");
    let mask = SpectralMask::from_csv(cfg.resolve(&pc.mask_file), true)?;
    let links = links(cfg)?;
    let os = pc.oversample.max(1);
    let fs = cfg.bandwidth_hz * os as f64;
    let spacing = pc.user_spacing_hz.unwrap_or(cfg.bandwidth_hz);
    let mut out = Vec::new();
    for (label, link) in &links {
        let per_trial = (0..cfg.trials.get())
            .into_par_iter()
            .map(|t| {
                let stream = RandomStream::for_trial(cfg.seed, &cfg.name, 0, t);
                let mut composite: Vec<Complex64> = Vec::new();
                let mut own = Vec::new();
                for u in 0..pc.users.max(1) {
                    let purpose = if u == 0 { Purpose::Bits } else { Purpose::User };
                    let bits = random_bits(&mut stream.rng_indexed(purpose, u as u64), link.bits_per_frame());
                    let x = link.transmit_oversampled(&link.qam.modulate(&bits)?, os)?;
                    let shift = u as f64 * spacing / fs;
                    let x: Vec<Complex64> = x
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * shift * i as f64))
                        .collect();
                    if u == 0 {
                        own = x.clone();
                        composite = x;
                    } else {
                        composite.iter_mut().zip(&x).for_each(|(a, b)| *a += b);
                    }
                }
                Ok((
                    psd_welch(&composite, fs, pc.segment_len, pc.overlap)?,
                    psd_welch(&own, fs, pc.segment_len, pc.overlap)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let composite = average_psd(per_trial.iter().map(|p| &p.0));
        let user = average_psd(per_trial.iter().map(|p| &p.1));
        let report = oob_check(&user, &mask, 0.0)?;
        let df = cfg.bandwidth_hz / link.params.m as f64;
        let f_side = (link.params.m as f64 / 2.0 + pc.sidelobe_offset as f64) * df;
        let sidelobe_dbr = 10.0 * (user.at(f_side) / user.peak()).log10();
        out.push(PsdResult { scheme: label.clone(), composite, user, mask: report, sidelobe_dbr });
    }
    Ok(out)
}

fn average_psd<'a>(psds: impl Iterator<Item = &'a Psd>) -> Psd {
    let mut it = psds.peekable();
    let first = it.peek().map(|p| (*p).clone()).expect("at least one trial");
    let mut sum = vec![0.0; first.density.len()];
    let mut count = 0.0;
    for p in it {
        sum.iter_mut().zip(&p.density).for_each(|(a, b)| *a += b);
        count += 1.0;
    }
    Psd { density: sum.into_iter().map(|v| v / count).collect(), ..first }
}

pub fn run_kpi(cfg: &ExperimentConfig) -> Result<Vec<KpiRow>> {
    cfg.schemes
        .iter()
        .map(|s| {
            let p = s.params(cfg.bandwidth_hz);
            Ok(KpiRow {
                scheme: s.label(),
                spectral_efficiency: spectral_efficiency(&p),
                latency_s: e2e_latency_s(&p),
                complexity: complexity(&p)?,
            })
        })
        .collect()
}
