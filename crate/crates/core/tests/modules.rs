use num_complex::Complex64;
use rand::Rng;

use thzwave::channels::{
    awgn_add, dd_build_matrix, dd_effective_channel, dd_from_mobility, generate_cluster_ray_tdl, tdl_apply, ClusterRayParams,
    DdChannel, DdPath, TdlChannel,
};
use thzwave::equalization::{matrix_equalize, otfs_equalize, EqualizerSpec, OtfsChannel};
use thzwave::harness::{coherence_bandwidth_hz, ExperimentConfig};
use thzwave::impairments::{gaussian_model_suffices, phn_generate, PhnModel, PhnParams, Side, GAUSSIAN_MODEL_LIMIT};
use thzwave::kpi::{papr_ccdf_theory, papr_db, papr_max_otfs_db, BerCounter};
use thzwave::linalg::CMatrix;
use thzwave::qam::QamConstellation;
use thzwave::rng::{complex_gaussian, Purpose, RandomStream};
use thzwave::signal::{kmh_to_mps, max_doppler_hz, Domain, FrameGrid, LatticeSpec};
use thzwave::waveforms::{
    fbmc_analyze, fbmc_modulate, ofdm_demodulate, ofdm_modulate, otfs_demodulate, otfs_modulate, PrototypeFilter, Scheme,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_grid(m: usize, n: usize, seed: u64, domain: Domain) -> FrameGrid {
    let mut r = RandomStream::new(seed, 0).rng(Purpose::Bits);
    let data = (0..m * n).map(|_| c(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect();
    FrameGrid::from_vec(m, n, domain, data).unwrap()
}

#[test]
fn ofdm_delay_within_prefix_is_a_phase_ramp() {
    let (m, cp, l) = (16, 4, 3);
    let g = random_grid(m, 1, 1, Domain::TimeFrequency);
    let x = ofdm_modulate(&g, cp).unwrap();
    // Shift by l samples inside the prefix: y[t] = x[t - l].
    let mut y = vec![c(0.0, 0.0); x.len()];
    y[l..].copy_from_slice(&x[..x.len() - l]);
    y[..l].copy_from_slice(&x[x.len() - l..]);
    let r = ofdm_demodulate(&y, m, 1, cp).unwrap();
    for k in 0..m {
        let ramp = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * l) as f64 / m as f64);
        assert!((r.get(k, 0) - g.get(k, 0) * ramp).norm() < 1e-10);
    }
    // Whatever sits in the prefix is discarded.
    let mut z = x.clone();
    z[..cp].iter_mut().for_each(|v| *v = c(9.0, -9.0));
    assert!((ofdm_demodulate(&z, m, 1, cp).unwrap().as_slice().iter().zip(g.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)) < 1e-10);
}

#[test]
fn otfs_identity_channel_and_energy() {
    let g = random_grid(8, 4, 2, Domain::DelayDoppler);
    let x = otfs_modulate(&g, 0).unwrap();
    let eg: f64 = g.as_slice().iter().map(|v| v.norm_sqr()).sum();
    let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    assert!((eg - ex).abs() < 1e-10);
    let ch = DdChannel::new(8, 4, vec![DdPath { gain: c(1.0, 0.0), delay: 0, doppler: 0 }]).unwrap();
    let y = otfs_demodulate(&ch.apply(&x).unwrap(), 8, 4, 0).unwrap();
    for (a, b) in y.as_slice().iter().zip(g.as_slice()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn fbmc_zero_input_and_real_recovery() {
    let f = PrototypeFilter::phydyas(4, 16).unwrap();
    let zero = FrameGrid::zeros(16, 3, Domain::TimeFrequency);
    let x = fbmc_modulate(&zero, &f).unwrap();
    assert!(x.iter().all(|v| v.norm() == 0.0));
    assert!(fbmc_analyze(&x, 6, &f).unwrap().as_slice().iter().all(|v| v.norm() == 0.0));
    // A single real half-symbol comes back on the real axis; the imaginary part holds interference only.
    let mut g = FrameGrid::zeros(16, 3, Domain::TimeFrequency);
    g.set(5, 1, c(0.8, 0.0));
    let a = fbmc_analyze(&fbmc_modulate(&g, &f).unwrap(), 6, &f).unwrap();
    let col = if 5 % 2 == 0 { 2 } else { 3 };
    assert!((a.get(5, col).re - 0.8).abs() < 2e-3);
}

#[test]
fn awgn_components_are_uncorrelated() {
    let mut r = RandomStream::new(3, 3).rng(Purpose::Noise);
    let y = awgn_add(&vec![c(0.0, 0.0); 1_000_000], 2.0, &mut r).unwrap();
    let n = y.len() as f64;
    let var = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
    let corr = y.iter().map(|v| v.re * v.im).sum::<f64>() / n / (var / 2.0);
    assert!((var - 2.0).abs() < 0.02);
    assert!(corr.abs() < 0.01);
}

#[test]
fn cluster_ray_profile_decays_with_cluster_constant() {
    let p = ClusterRayParams::default();
    let ts = 0.25e-9;
    let mut r = RandomStream::new(4, 0).rng(Purpose::Channel);
    let mut pdp = Vec::new();
    let draws = 10_000;
    for _ in 0..draws {
        let t = generate_cluster_ray_tdl(&p, ts, &mut r).unwrap();
        assert!((t.power() - 1.0).abs() < 1e-12);
        if pdp.len() < t.taps.len() {
            pdp.resize(t.taps.len(), 0.0);
        }
        for (k, h) in t.taps.iter().enumerate() {
            pdp[k] += h.norm_sqr() / draws as f64;
        }
    }
    // Least-squares slope of ln(power) over the late part of the profile.
    let pts: Vec<(f64, f64)> = (20..100).map(|k| (k as f64 * ts, pdp[k].ln())).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let decay = -1.0 / slope;
    assert!((decay - p.cluster_decay_s).abs() <= 0.15 * p.cluster_decay_s, "fitted {decay:e}");
}

#[test]
fn convolution_matches_direct_sum() {
    let mut r = RandomStream::new(5, 0).rng(Purpose::Channel);
    let taps: Vec<Complex64> = (0..5).map(|_| complex_gaussian(&mut r, 1.0)).collect();
    let x: Vec<Complex64> = (0..40).map(|_| complex_gaussian(&mut r, 1.0)).collect();
    let y = tdl_apply(&TdlChannel::new(taps.clone(), 1.0), &x);
    for (t, v) in y.iter().enumerate() {
        let mut s = c(0.0, 0.0);
        for (l, h) in taps.iter().enumerate() {
            if t >= l && t - l < x.len() {
                s += h * x[t - l];
            }
        }
        assert!((v - s).norm() < 1e-10);
    }
    let delay = tdl_apply(&TdlChannel::new(vec![c(0.0, 0.0), c(1.0, 0.0)], 1.0), &x);
    assert_eq!(delay[1..], x[..]);
}

#[test]
fn mobility_doppler_indices() {
    let tdl = TdlChannel::new(vec![c(0.8, 0.0), c(0.0, 0.5), c(0.3, 0.1)], 2e-9);
    let lattice = LatticeSpec::critical(128, 32, 0.5e9);
    let mut r = RandomStream::new(6, 0).rng(Purpose::Doppler);
    let still = dd_from_mobility(&tdl, 0.0, 0.5e12, &lattice, &mut r).unwrap();
    assert!(still.paths().iter().all(|p| p.doppler == 0));
    let nu = max_doppler_hz(kmh_to_mps(500.0), 0.5e12);
    assert!((nu - 231_642.0).abs() < 1.0);
    let bound = (lattice.n as f64 * lattice.symbol_period_s * nu).round() as i64;
    for _ in 0..10_000 {
        let ch = dd_from_mobility(&tdl, kmh_to_mps(500.0), 0.5e12, &lattice, &mut r).unwrap();
        assert!(ch.paths().iter().all(|p| p.doppler.abs() <= bound));
    }
}

#[test]
fn dd_matrices_and_effective_channel() {
    let shift = DdChannel::new(2, 2, vec![DdPath { gain: c(1.0, 0.0), delay: 1, doppler: 0 }]).unwrap();
    assert_eq!(dd_build_matrix(&shift).unwrap(), CMatrix::cyclic_shift(4));
    let ident = DdChannel::new(4, 4, vec![DdPath { gain: c(1.0, 0.0), delay: 0, doppler: 0 }]).unwrap();
    assert!(dd_effective_channel(&ident).to_dense().unwrap().max_abs_diff(&CMatrix::identity(16)) < 1e-12);
    let dop = DdChannel::new(2, 2, vec![DdPath { gain: c(1.0, 0.0), delay: 0, doppler: -1 }]).unwrap();
    let y = dop.apply(&vec![c(1.0, 0.0); 4]).unwrap();
    for (u, v) in y.iter().enumerate() {
        assert!((v - Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * u as f64 / 4.0)).norm() < 1e-12);
    }
    let ch = DdChannel::new(
        8,
        4,
        vec![
            DdPath { gain: c(0.7, 0.2), delay: 0, doppler: 1 },
            DdPath { gain: c(-0.4, 0.3), delay: 3, doppler: -1 },
        ],
    )
    .unwrap();
    let h = dd_build_matrix(&ch).unwrap();
    let eff = dd_effective_channel(&ch).to_dense().unwrap();
    assert!((h.frobenius() - eff.frobenius()).abs() < 1e-10);
}

#[test]
fn equalizer_limits() {
    let mut r = RandomStream::new(7, 0).rng(Purpose::Channel);
    let n = 16;
    let h = CMatrix::from_fn(n, n, |i, j| if i == j { c(4.0, 0.0) } else { complex_gaussian(&mut r, 0.1) });
    let x: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut r, 1.0)).collect();
    let y = h.matvec(&x);
    let zf = matrix_equalize(&y, &h, &EqualizerSpec::zf()).unwrap();
    let err: f64 = zf.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!(err / norm <= 1e-8);
    let shrunk = matrix_equalize(&y, &h, &EqualizerSpec::mmse(1e6)).unwrap();
    let sn: f64 = shrunk.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let zn: f64 = zf.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!(sn < 0.01 * zn);

    // Two-path delay-Doppler channel: noiseless ZF then hard decision recovers 4-QAM exactly.
    let qam = QamConstellation::new(4).unwrap();
    let bits: Vec<u8> = (0..64).map(|_| r.random::<bool>() as u8).collect();
    let g = FrameGrid::from_vec(8, 4, Domain::DelayDoppler, qam.modulate(&bits).unwrap()).unwrap();
    let ch = DdChannel::new(
        8,
        4,
        vec![
            DdPath { gain: c(1.0, 0.0), delay: 0, doppler: 0 },
            DdPath { gain: c(0.4, -0.3), delay: 2, doppler: 1 },
        ],
    )
    .unwrap();
    let eff = dd_effective_channel(&ch);
    let y = eff.apply(&g).unwrap();
    let xhat = otfs_equalize(&y, OtfsChannel::Paths(&eff), &EqualizerSpec::zf()).unwrap();
    assert_eq!(qam.demodulate(xhat.as_slice()), bits);
}

#[test]
fn phase_noise_statistics() {
    let p = PhnParams::from_oscillator(PhnModel::Gaussian, -110.0, 1e6, 10e9).unwrap();
    assert!((p.sigma_g2 - 0.1).abs() < 1e-12);
    let w = PhnParams::new(PhnModel::Wiener, 0.0, 1e-4).unwrap();
    let phi = phn_generate(&w, 10_000_000, &RandomStream::new(8, 0), Side::Tx);
    let n = (phi.len() - 1) as f64;
    let var = phi.windows(2).map(|d| (d[1] - d[0]).powi(2)).sum::<f64>() / n;
    assert!((var - 1e-4).abs() < 0.02 * 1e-4);
    let none = PhnParams::new(PhnModel::Combined, 0.0, 0.0).unwrap();
    assert!(phn_generate(&none, 100, &RandomStream::new(8, 1), Side::Rx).iter().all(|&v| v == 0.0));

    assert!(gaussian_model_suffices(32, 1e6, 10e9));
    assert!(!gaussian_model_suffices(1, 10e9, 10e9));
    let (f, b) = (1e8, 1e9);
    let edge = (GAUSSIAN_MODEL_LIMIT * (b / f) * (b / f)).floor() as usize;
    assert!(gaussian_model_suffices(edge, f, b));
    assert!(!gaussian_model_suffices(edge + 1, f, b));
}

#[test]
fn papr_reference_points() {
    assert!((papr_db(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap() - 10.0 * 4f64.log10()).abs() < 1e-12);
    assert!((papr_max_otfs_db(4) - 6.0206).abs() < 1e-4);
    assert_eq!(papr_max_otfs_db(1), 0.0);
    let half = 10.0 * std::f64::consts::LN_2.log10();
    let t = papr_ccdf_theory(Scheme::CpOfdm, 1, 1, &[half, -40.0]).unwrap();
    assert!((t.probabilities[0] - 0.5).abs() < 1e-12);
    assert!(t.probabilities[1] > 0.9999);
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
    let ofdm = papr_ccdf_theory(Scheme::CpOfdm, 128, 1, &grid).unwrap();
    let otfs = papr_ccdf_theory(Scheme::Otfs, 128, 32, &grid).unwrap();
    assert!(otfs.threshold_at(1e-3).unwrap() > ofdm.threshold_at(1e-3).unwrap());
}

#[test]
fn wilson_upper_bound_for_clean_run() {
    let (lo, hi) = BerCounter::new(0, 1_000_000).ci95();
    assert_eq!(lo, 0.0);
    assert!((hi - 3.84e-6).abs() < 0.05e-6);
    assert_eq!(BerCounter::new(10, 10).ber(), 1.0);
}

#[test]
fn coherence_and_zero_trials() {
    assert!((coherence_bandwidth_hz(0.2e-9) - 1e9).abs() < 1.0);
    let cfg = "name = \"x\"\nkind = \"papr_ccdf\"\ntrials = 0\nbandwidth_hz = 1e9\n[papr]\nthresholds_db = { start = 0, stop = 10 }\n[[schemes]]\nscheme = \"cp_ofdm\"\nm = 16\n";
    assert!(ExperimentConfig::parse(cfg).is_err());
    assert!(ExperimentConfig::parse(&cfg.replace("trials = 0", "trials = 1")).is_ok());
}
