//! Per-scheme transmit and receive chains and the channel operators they run through.

use num_complex::Complex64;

use crate::channels::DdChannel;
use crate::dft;
use crate::equalization::{otfs_equalize, single_tap_equalize, EqualizerSpec, OtfsChannel};
use crate::channels::dd_effective_channel;
use crate::error::{config, Result};
use crate::impairments::remove_common_phase;
use crate::qam::QamConstellation;
use crate::signal::{Domain, FrameGrid};
use crate::waveforms::{
    add_cyclic_prefix, dfts_despread, dfts_modulate, fbmc_analyze, fbmc_combine, fbmc_modulate, fbmc_stagger,
    fbmc_synthesize, ofdm_demodulate, ofdm_modulate, otfs_demodulate, otfs_modulate, scfde_from_frequency,
    scfde_modulate, scfde_to_frequency, strip_cyclic_prefix, time_to_dd, PrototypeFilter, Scheme, WaveformParams,
};

/// Channel state known to the receiver.
pub enum Csi<'a> {
    /// Unit gain; no equalization.
    Flat,
    /// Time-invariant response at normalized frequency (cycles per sample, in [-0.5, 0.5)).
    Frequency(&'a dyn Fn(f64) -> Complex64),
    /// Time-varying channel referenced to sample `origin`.
    Doubly(&'a DdChannel, usize),
}

pub struct Link {
    pub params: WaveformParams,
    pub qam: QamConstellation,
    filter: Option<PrototypeFilter>,
}

impl Link {
    pub fn new(params: WaveformParams, qam_order: usize) -> Result<Self> {
        params.validate()?;
        let filter = match params.scheme {
            Scheme::Fbmc => Some(PrototypeFilter::phydyas(params.overlap, params.m)?),
            _ => None,
        };
        Ok(Self { params, qam: QamConstellation::new(qam_order)?, filter })
    }

    pub fn bits_per_frame(&self) -> usize {
        self.params.symbols_per_frame() * self.qam.bits_per_symbol()
    }

    pub fn filter(&self) -> Option<&PrototypeFilter> {
        self.filter.as_ref()
    }

    /// Symbols per equalization block (one CP block, one FBMC symbol, or the OTFS frame).
    pub fn block_symbols(&self) -> usize {
        match self.params.scheme {
            Scheme::Otfs => self.params.symbols_per_frame(),
            _ => self.params.symbols_per_frame() / self.params.n,
        }
    }

    pub fn transmit(&self, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
        let p = &self.params;
        match p.scheme {
            Scheme::CpOfdm => ofdm_modulate(&FrameGrid::from_vec(p.m, p.n, Domain::TimeFrequency, symbols.to_vec())?, p.cp_len),
            Scheme::ScFde => scfde_modulate(symbols, p.m, p.cp_len),
            Scheme::DftsOfdm => dfts_modulate(symbols, p.m, p.spread_len, p.mapping, p.cp_len),
            Scheme::Fbmc => {
                let grid = FrameGrid::from_vec(p.m, p.n, Domain::TimeFrequency, symbols.to_vec())?;
                fbmc_modulate(&grid, self.filter.as_ref().expect("FBMC filter"))
            }
            Scheme::Otfs => otfs_modulate(&FrameGrid::from_vec(p.m, p.n, Domain::DelayDoppler, symbols.to_vec())?, p.cp_len),
        }
    }

    /// Transmit signal at `oversample` times the symbol rate, band-limited per block.
    pub fn transmit_oversampled(&self, symbols: &[Complex64], oversample: usize) -> Result<Vec<Complex64>> {
        if oversample <= 1 {
            return self.transmit(symbols);
        }
        let p = &self.params;
        match p.scheme {
            Scheme::Fbmc => {
                let grid = FrameGrid::from_vec(p.m, p.n, Domain::TimeFrequency, symbols.to_vec())?;
                let a = fbmc_stagger(&grid);
                let big = oversample * p.m;
                let mut wide = vec![0.0; big * 2 * p.n];
                for col in 0..2 * p.n {
                    for r in 0..p.m {
                        let rr = if r < p.m / 2 { r } else { r + big - p.m };
                        wide[rr + col * big] = a[r + col * p.m];
                    }
                }
                fbmc_synthesize(&wide, 2 * p.n, &PrototypeFilter::phydyas(p.overlap, big)?)
            }
            Scheme::Otfs => {
                // rectangular pulse per time slot of M samples, one prefix per frame
                let len = p.m * p.n;
                let x = strip_cyclic_prefix(&self.transmit(symbols)?, len, p.cp_len, 1)?;
                let mut out = Vec::with_capacity(len * oversample);
                for slot in x.chunks(p.m) {
                    out.extend(interpolate(slot, oversample));
                }
                Ok(add_cyclic_prefix(&out, len * oversample, p.cp_len * oversample))
            }
            _ => {
                let x = strip_cyclic_prefix(&self.transmit(symbols)?, p.m, p.cp_len, p.n)?;
                let mut out = Vec::with_capacity(x.len() * oversample);
                for block in x.chunks(p.m) {
                    out.extend(interpolate(block, oversample));
                }
                Ok(add_cyclic_prefix(&out, p.m * oversample, p.cp_len * oversample))
            }
        }
    }

    /// Passes the transmit signal through a time-invariant channel. CP blocks see a
    /// circular channel; FBMC sees a linear one over the whole frame.
    pub fn apply_lti(&self, tx: &[Complex64], h: &dyn Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
        let p = &self.params;
        let (block, cp, blocks) = match p.scheme {
            Scheme::Fbmc => {
                let len = tx.len() + 2 * p.m;
                let mut x = tx.to_vec();
                x.resize(len, Complex64::new(0.0, 0.0));
                let mut y = circular_filter(&x, h);
                y.truncate(tx.len());
                return Ok(y);
            }
            Scheme::Otfs => (p.m * p.n, p.cp_len, 1),
            _ => (p.m, p.cp_len, p.n),
        };
        let payload = strip_cyclic_prefix(tx, block, cp, blocks)?;
        let mut out = Vec::with_capacity(payload.len());
        for b in payload.chunks(block) {
            out.extend(circular_filter(b, h));
        }
        Ok(add_cyclic_prefix(&out, block, cp))
    }

    /// Equalized symbol estimates in transmit order.
    pub fn receive(
        &self,
        rx: &[Complex64],
        csi: &Csi<'_>,
        eq: &EqualizerSpec,
        genie: Option<&[Complex64]>,
    ) -> Result<Vec<Complex64>> {
        let p = &self.params;
        let mut est = match p.scheme {
            Scheme::CpOfdm | Scheme::ScFde | Scheme::DftsOfdm => {
                let mut grid = match p.scheme {
                    Scheme::ScFde => scfde_to_frequency(rx, p.m, p.n, p.cp_len)?,
                    _ => ofdm_demodulate(rx, p.m, p.n, p.cp_len)?,
                };
                for n in 0..p.n {
                    let h = match csi {
                        Csi::Flat => continue,
                        Csi::Frequency(f) => bins(p.m, f),
                        Csi::Doubly(ch, origin) => ch.block_response(p.m, n * (p.m + p.cp_len) + p.cp_len, *origin),
                    };
                    let z = single_tap_equalize(grid.column(n), &h, eq)?;
                    grid.column_mut(n).copy_from_slice(&z);
                }
                match p.scheme {
                    Scheme::ScFde => scfde_from_frequency(&grid),
                    Scheme::DftsOfdm => dfts_despread(&grid, p.spread_len, p.mapping)?,
                    _ => grid.into_vec(),
                }
            }
            Scheme::Fbmc => {
                let filter = self.filter.as_ref().expect("FBMC filter");
                let mut a = fbmc_analyze(rx, 2 * p.n, filter)?;
                match csi {
                    Csi::Flat => {}
                    Csi::Frequency(f) => {
                        let h = bins(p.m, f);
                        for col in 0..2 * p.n {
                            let z = single_tap_equalize(a.column(col), &h, eq)?;
                            a.column_mut(col).copy_from_slice(&z);
                        }
                    }
                    Csi::Doubly(..) => return config("FBMC is not supported over time-varying channels"),
                }
                fbmc_combine(&a)?.into_vec()
            }
            Scheme::Otfs => match csi {
                Csi::Flat => otfs_demodulate(rx, p.m, p.n, p.cp_len)?.into_vec(),
                Csi::Frequency(f) => {
                    let h = bins(p.m * p.n, f);
                    let y = otfs_demodulate(rx, p.m, p.n, p.cp_len)?;
                    otfs_equalize(&y, OtfsChannel::Circulant(&h), eq)?.into_vec()
                }
                Csi::Doubly(ch, _) => {
                    let y = time_to_dd(&strip_cyclic_prefix(rx, p.m * p.n, p.cp_len, 1)?, p.m, p.n)?;
                    otfs_equalize(&y, OtfsChannel::Paths(&dd_effective_channel(ch)), eq)?.into_vec()
                }
            },
        };
        if let Some(reference) = genie {
            let b = self.block_symbols();
            for (blk, r) in est.chunks_mut(b).zip(reference.chunks(b)) {
                remove_common_phase(blk, r);
            }
        }
        Ok(est)
    }
}

/// Frequency response sampled on the `m` DFT bins.
fn bins(m: usize, h: &dyn Fn(f64) -> Complex64) -> Vec<Complex64> {
    (0..m).map(|k| h(dft::signed_bin(k, m) / m as f64)).collect()
}

fn circular_filter(x: &[Complex64], h: &dyn Fn(f64) -> Complex64) -> Vec<Complex64> {
    let mut v = dft::fft_vec(x);
    v.iter_mut().zip(bins(x.len(), h)).for_each(|(a, g)| *a *= g);
    dft::ifft(&mut v);
    v
}

/// Trigonometric interpolation of one periodic block.
fn interpolate(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    let m = x.len();
    let big = m * factor;
    let spec = dft::fft_vec(x);
    let mut wide = vec![Complex64::new(0.0, 0.0); big];
    for (k, &v) in spec.iter().enumerate() {
        let kk = if 2 * k < m { k } else { k + big - m };
        wide[kk] = v;
    }
    dft::ifft(&mut wide);
    wide
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_bits, Purpose, RandomStream};

    fn frame(link: &Link, seed: u64) -> (Vec<u8>, Vec<Complex64>) {
        let bits = random_bits(&mut RandomStream::new(seed, 0).rng(Purpose::Bits), link.bits_per_frame());
        let s = link.qam.modulate(&bits).unwrap();
        (bits, s)
    }

    #[test]
    fn noiseless_links_are_transparent() {
        for scheme in Scheme::ALL {
            let cp = if scheme == Scheme::Fbmc { 0 } else { 4 };
            let p = WaveformParams::new(scheme, 16, 4, cp, 1e9).with_spread(8, Default::default());
            let link = Link::new(p, 16).unwrap();
            let (bits, s) = frame(&link, 1);
            let tx = link.transmit(&s).unwrap();
            let rx = link.receive(&tx, &Csi::Flat, &EqualizerSpec::zf(), None).unwrap();
            assert_eq!(link.qam.demodulate(&rx), bits, "{scheme:?}");
            let selective = |f: f64| Complex64::from_polar(1.0 + 0.3 * (2.0 * std::f64::consts::PI * f).cos(), -2.0 * std::f64::consts::PI * f);
            let flat = |_: f64| Complex64::from_polar(0.8, 0.3);
            let h: &dyn Fn(f64) -> Complex64 = if scheme == Scheme::Fbmc { &flat } else { &selective };
            let y = link.apply_lti(&tx, h).unwrap();
            let rx = link.receive(&y, &Csi::Frequency(h), &EqualizerSpec::zf(), None).unwrap();
            let err = rx.iter().zip(&s).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let tol = if scheme == Scheme::Fbmc { 1e-2 } else { 1e-10 };
            assert!(err < tol, "{scheme:?} {err}");
        }
    }

    #[test]
    fn oversampling_keeps_samples() {
        let p = WaveformParams::new(Scheme::CpOfdm, 16, 2, 4, 1e9);
        let link = Link::new(p, 4).unwrap();
        let (_, s) = frame(&link, 2);
        let x = link.transmit(&s).unwrap();
        let y = link.transmit_oversampled(&s, 4).unwrap();
        assert_eq!(y.len(), 4 * x.len());
        for (i, v) in x.iter().enumerate() {
            assert!((y[4 * i] * 2.0 - v).norm() < 1e-12);
        }
    }
}
