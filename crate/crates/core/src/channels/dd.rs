//! Delay-Doppler channel with integer delay and Doppler indices.
//!
//! On an M x N lattice a path with delay index l and Doppler index k acts on
//! the time samples of one frame as y[u] = h exp(j 2 pi k (u - l) / MN) x[u - l mod MN].

use num_complex::Complex64;
use rand::Rng;

use crate::error::{config, dimension, Result};
use crate::linalg::{CMatrix, CyclicBanded};
use crate::signal::{max_doppler_hz, FrameGrid, LatticeSpec};
use crate::waveforms::{dd_to_time, time_to_dd};

use super::tdl::TdlChannel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdPath {
    pub gain: Complex64,
    pub delay: usize,
    pub doppler: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DdChannel {
    m: usize,
    n: usize,
    paths: Vec<DdPath>,
    twiddle: Vec<Complex64>,
}

impl DdChannel {
    pub fn new(m: usize, n: usize, paths: Vec<DdPath>) -> Result<Self> {
        if m == 0 || n == 0 {
            return config("delay-Doppler grid must be non-empty");
        }
        let kmin = -((n / 2) as i64);
        let kmax = n.div_ceil(2) as i64 - 1;
        for p in &paths {
            if p.delay >= m {
                return config(format!("delay index {} outside 0..{m}", p.delay));
            }
            if p.doppler < kmin || p.doppler > kmax {
                return config(format!("Doppler index {} outside {kmin}..={kmax}", p.doppler));
            }
        }
        let len = m * n;
        let twiddle = (0..len)
            .map(|e| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / len as f64))
            .collect();
        Ok(Self { m, n, paths, twiddle })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn paths(&self) -> &[DdPath] {
        &self.paths
    }

    pub fn frame_len(&self) -> usize {
        self.m * self.n
    }

    pub fn max_delay(&self) -> usize {
        self.paths.iter().map(|p| p.delay).max().unwrap_or(0)
    }

    pub fn power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    /// exp(j 2 pi k t / MN) for any integer t.
    fn phase(&self, k: i64, t: i64) -> Complex64 {
        let len = self.twiddle.len() as i64;
        self.twiddle[(k * t).rem_euclid(len) as usize]
    }

    /// Cyclic action on one frame of MN samples.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let len = self.frame_len();
        if x.len() != len {
            return dimension(format!("frame of {len} samples expected, got {}", x.len()));
        }
        let mut y = vec![Complex64::new(0.0, 0.0); len];
        for p in &self.paths {
            for (u, out) in y.iter_mut().enumerate() {
                let src = (u + len - p.delay) % len;
                *out += p.gain * self.phase(p.doppler, u as i64 - p.delay as i64) * x[src];
            }
        }
        Ok(y)
    }

    /// H^H y.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let len = self.frame_len();
        if y.len() != len {
            return dimension(format!("frame of {len} samples expected, got {}", y.len()));
        }
        let mut x = vec![Complex64::new(0.0, 0.0); len];
        for p in &self.paths {
            for (v, out) in x.iter_mut().enumerate() {
                let w = (v + p.delay) % len;
                *out += (p.gain * self.phase(p.doppler, v as i64)).conj() * y[w];
            }
        }
        Ok(x)
    }

    /// Time-varying linear convolution over an arbitrary sample stream.
    ///
    /// Sample `t` of the output sees phase exp(j 2 pi k (t - origin - l) / MN), so a
    /// frame whose payload starts at `origin` experiences exactly [`DdChannel::apply`]
    /// once the prefix is removed. The output keeps the input length.
    pub fn apply_linear(&self, x: &[Complex64], origin: usize) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        for p in &self.paths {
            for t in p.delay..x.len() {
                let ph = self.phase(p.doppler, t as i64 - origin as i64 - p.delay as i64);
                y[t] += p.gain * ph * x[t - p.delay];
            }
        }
        y
    }

    /// Diagonal of the per-symbol frequency-domain channel for a block of `m_fft`
    /// samples starting at absolute sample `start` (inter-carrier leakage ignored).
    pub fn block_response(&self, m_fft: usize, start: usize, origin: usize) -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); m_fft];
        for p in &self.paths {
            let mean: Complex64 = (0..m_fft)
                .map(|u| self.phase(p.doppler, (start + u) as i64 - origin as i64 - p.delay as i64))
                .sum::<Complex64>()
                / m_fft as f64;
            for (k, v) in h.iter_mut().enumerate() {
                let e = -2.0 * std::f64::consts::PI * ((k * p.delay) % m_fft) as f64 / m_fft as f64;
                *v += p.gain * mean * Complex64::from_polar(1.0, e);
            }
        }
        h
    }

    /// Response of the channel frozen at absolute sample `t`, evaluated at baseband `f_norm` (cycles/sample).
    pub fn snapshot_response(&self, f_norm: f64, t: usize, origin: usize) -> Complex64 {
        self.paths
            .iter()
            .map(|p| {
                p.gain
                    * self.phase(p.doppler, t as i64 - origin as i64 - p.delay as i64)
                    * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f_norm * p.delay as f64)
            })
            .sum()
    }

    /// H^H H + reg I in cyclic-band storage.
    pub fn gram(&self, reg: f64) -> CyclicBanded {
        let len = self.frame_len();
        let lmin = self.paths.iter().map(|p| p.delay).min().unwrap_or(0);
        let b = self.max_delay() - lmin;
        let mut a = CyclicBanded::zeros(len, b);
        for pi in &self.paths {
            for pj in &self.paths {
                let d = pi.delay as isize - pj.delay as isize;
                let c = pi.gain.conj() * pj.gain;
                for u in 0..len {
                    let v = (u as isize + d).rem_euclid(len as isize) as i64;
                    let ph = self.phase(pj.doppler, v) * self.phase(pi.doppler, -(u as i64));
                    a.add(u, d, c * ph);
                }
            }
        }
        for u in 0..len {
            a.add(u, 0, Complex64::new(reg, 0.0));
        }
        a
    }
}

/// Dense MN x MN matrix sum_i h_i P^{l_i} D^{k_i}; intended for small grids.
pub fn dd_build_matrix(ch: &DdChannel) -> Result<CMatrix> {
    let len = ch.frame_len();
    if len > 4096 {
        return config(format!("dense delay-Doppler matrix of order {len} is too large"));
    }
    let mut h = CMatrix::zeros(len, len);
    for p in ch.paths() {
        for v in 0..len {
            h[((v + p.delay) % len, v)] += p.gain * ch.phase(p.doppler, v as i64);
        }
    }
    Ok(h)
}

pub fn dd_apply(ch: &DdChannel, x: &[Complex64]) -> Result<Vec<Complex64>> {
    ch.apply(x)
}

/// Channel seen between delay-Doppler grids: (F_N kron I_M) H (F_N^H kron I_M).
#[derive(Clone, Debug)]
pub struct DdEffectiveChannel {
    channel: DdChannel,
}

impl DdEffectiveChannel {
    pub fn channel(&self) -> &DdChannel {
        &self.channel
    }

    pub fn apply(&self, grid: &FrameGrid) -> Result<FrameGrid> {
        let (m, n) = (self.channel.m(), self.channel.n());
        if grid.rows() != m || grid.cols() != n {
            return dimension(format!("grid {}x{} vs channel {m}x{n}", grid.rows(), grid.cols()));
        }
        let y = self.channel.apply(&dd_to_time(grid))?;
        time_to_dd(&y, m, n)
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        let (m, n) = (self.channel.m(), self.channel.n());
        let u = CMatrix::dft(n).kron(&CMatrix::identity(m));
        Ok(u.matmul(&dd_build_matrix(&self.channel)?).matmul(&u.adjoint()))
    }
}

pub fn dd_effective_channel(ch: &DdChannel) -> DdEffectiveChannel {
    DdEffectiveChannel { channel: ch.clone() }
}

/// Gives every tap of `tdl` an integer Doppler index round(N T nu_max cos theta), theta uniform.
pub fn dd_from_mobility(
    tdl: &TdlChannel,
    speed_mps: f64,
    carrier_hz: f64,
    lattice: &LatticeSpec,
    rng: &mut impl Rng,
) -> Result<DdChannel> {
    let nu_max = max_doppler_hz(speed_mps, carrier_hz);
    if nu_max >= lattice.subcarrier_spacing_hz {
        return config(format!(
            "maximum Doppler {nu_max:.1} Hz violates ν_max < Δf < 1/τ_max (Δf = {:.1} Hz)",
            lattice.subcarrier_spacing_hz
        ));
    }
    if tdl.taps.len() > lattice.m {
        return config(format!("{} taps exceed the {} delay bins", tdl.taps.len(), lattice.m));
    }
    let nt = lattice.n as f64 * lattice.symbol_period_s;
    let mut paths = Vec::new();
    for (l, &h) in tdl.taps.iter().enumerate() {
        let theta: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        if h.norm_sqr() == 0.0 {
            continue;
        }
        let k = (nt * nu_max * theta.cos()).round() as i64;
        paths.push(DdPath { gain: h, delay: l, doppler: k });
    }
    DdChannel::new(lattice.m, lattice.n, paths)
}
