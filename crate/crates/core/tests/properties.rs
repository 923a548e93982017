use num_complex::Complex64;
use proptest::prelude::*;

use thzwave::channels::{DdChannel, DdPath};
use thzwave::harness::Link;
use thzwave::kpi::{ber_aggregate, ccdf, oob_check, papr_db, psd_welch, BerCounter, SpectralMask};
use thzwave::signal::{Domain, FrameGrid};
use thzwave::waveforms::{otfs_modulate, Mapping, Scheme, WaveformParams};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

fn counter() -> impl Strategy<Value = BerCounter> {
    (1u64..10_000).prop_flat_map(|bits| (0..=bits, Just(bits))).prop_map(|(e, b)| BerCounter::new(e, b))
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ccdf_is_monotone_probability(samples in prop::collection::vec(0.0f64..15.0, 1..200)) {
        let thr: Vec<f64> = (0..60).map(|i| i as f64 * 0.25).collect();
        let c = ccdf(&samples, &thr);
        prop_assert!(c.probabilities.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!(c.probabilities.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn ber_merge_is_a_commutative_monoid(a in counter(), b in counter(), c in counter()) {
        prop_assert_eq!(a.merge(b).merge(c), a.merge(b.merge(c)));
        prop_assert_eq!(a.merge(b), b.merge(a));
        let pooled = ber_aggregate(&[a, b, c]).unwrap();
        prop_assert_eq!(pooled.errors, a.errors + b.errors + c.errors);
        prop_assert_eq!(pooled.bits, a.bits + b.bits + c.bits);
    }

    #[test]
    fn wilson_interval_brackets_estimate(c in counter()) {
        let (lo, hi) = c.ci95();
        prop_assert!(0.0 <= lo && lo <= c.ber() + 1e-15);
        prop_assert!(c.ber() <= hi + 1e-15 && hi <= 1.0);
    }

    #[test]
    fn links_round_trip_without_noise(
        scheme in prop::sample::select(vec![Scheme::CpOfdm, Scheme::ScFde, Scheme::DftsOfdm, Scheme::Otfs]),
        log_m in 3u32..7,
        n in 1usize..5,
        cp in 0usize..8,
        seed in any::<u64>(),
    ) {
        let m = 1usize << log_m;
        let mut p = WaveformParams::new(scheme, m, n, cp.min(m - 1), 1e9);
        if scheme == Scheme::DftsOfdm {
            p = p.with_spread(m / 2, Mapping::Localized);
        }
        let total = p.symbols_per_frame();
        let link = Link::new(p, 16).unwrap();
        let syms: Vec<Complex64> = (0..total)
            .map(|i| {
                let v = thzwave::rng::splitmix64(seed ^ i as u64);
                Complex64::new((v & 0xffff) as f64 / 65536.0 - 0.5, (v >> 16 & 0xffff) as f64 / 65536.0 - 0.5)
            })
            .collect();
        let tx = link.transmit(&syms).unwrap();
        let rx = link.receive(&tx, &thzwave::harness::Csi::Flat, &thzwave::equalization::EqualizerSpec::zf(), None).unwrap();
        for (a, b) in syms.iter().zip(&rx) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn psd_satisfies_parseval(phases in prop::collection::vec(0.0f64..6.3, 2048), amp in 0.1f64..3.0) {
        // Constant envelope, so the power is known exactly whatever the window weighting.
        let x: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(amp, p)).collect();
        let psd = psd_welch(&x, 1e9, 256, 0.5).unwrap();
        let mean = amp * amp;
        prop_assert!((psd.total_power() - mean).abs() <= 0.01 * mean);
    }

    #[test]
    fn otfs_papr_never_exceeds_n(bits in prop::collection::vec(any::<(bool, bool)>(), 64 * 4)) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d: Vec<Complex64> = bits.iter().map(|&(a, b)| Complex64::new(if a { s } else { -s }, if b { s } else { -s })).collect();
        let g = FrameGrid::from_vec(64, 4, Domain::DelayDoppler, d).unwrap();
        let x = otfs_modulate(&g, 0).unwrap();
        prop_assert!(papr_db(&x).unwrap() <= 10.0 * 4f64.log10() + 1e-9);
    }

    #[test]
    fn dd_adjoint_identity(
        x in complex_vec(32),
        y in complex_vec(32),
        delay in 0usize..8,
        doppler in -2i64..2,
        g in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let paths = vec![
            DdPath { gain: Complex64::new(1.0, 0.0), delay: 0, doppler: 0 },
            DdPath { gain: Complex64::new(g.0, g.1), delay, doppler },
        ];
        let ch = DdChannel::new(8, 4, paths).unwrap();
        let lhs = inner(&ch.apply(&x).unwrap(), &y);
        let rhs = inner(&x, &ch.apply_adjoint(&y).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn mask_at_level_passes_and_tone_above_fails() {
    let mask = SpectralMask::new(vec![(0.0, 0.0), (1e8, 0.0), (2e8, -30.0), (5e8, -30.0)], true).unwrap();
    let n = 4096;
    let x: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, 0.3 * i as f64)).collect();
    let psd = psd_welch(&x, 1e9, 512, 0.5).unwrap();
    assert!(oob_check(&psd, &mask, 0.0).unwrap().pass());
    // A strong tone far outside the passband violates the stopband.
    let tone: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.01 * i as f64) + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.35 * i as f64))
        .collect();
    let psd = psd_welch(&tone, 1e9, 512, 0.5).unwrap();
    let rep = oob_check(&psd, &mask, 0.0).unwrap();
    assert!(!rep.pass());
    assert!(rep.worst_freq_hz.abs() > 2e8);
}
