//! Unitary DFT helpers backed by a per-thread FFT planner.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn run(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    plan.process(buf);
    let s = (n as f64).sqrt().recip();
    for v in buf.iter_mut() {
        *v *= s;
    }
}

/// In-place F_n x with F_n[k, u] = exp(-j 2 pi k u / n) / sqrt(n).
pub fn fft(buf: &mut [Complex64]) {
    run(buf, false);
}

/// In-place F_n^H x.
pub fn ifft(buf: &mut [Complex64]) {
    run(buf, true);
}

pub fn fft_vec(x: &[Complex64]) -> Vec<Complex64> {
    let mut v = x.to_vec();
    fft(&mut v);
    v
}

pub fn ifft_vec(x: &[Complex64]) -> Vec<Complex64> {
    let mut v = x.to_vec();
    ifft(&mut v);
    v
}

/// Signed frequency index of DFT bin `k` out of `n` (bins at or above n/2 are negative).
pub fn signed_bin(k: usize, n: usize) -> f64 {
    if k < n.div_ceil(2) {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Baseband frequencies of the `n` DFT bins at sample rate `fs`.
pub fn bin_frequencies(n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|k| signed_bin(k, n) * fs / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_roundtrip_and_scaling() {
        let x: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -(i as f64) / 2.0)).collect();
        let y = fft_vec(&x);
        let e_in: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let e_out: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((e_in - e_out).abs() < 1e-9);
        let z = ifft_vec(&y);
        for (a, b) in x.iter().zip(&z) {
            assert!((a - b).norm() < 1e-12);
        }
        let s: Complex64 = x.iter().sum::<Complex64>() / 8f64.sqrt();
        assert!((y[0] - s).norm() < 1e-12);
    }

    #[test]
    fn bin_frequency_order() {
        assert_eq!(bin_frequencies(4, 4.0), vec![0.0, 1.0, -2.0, -1.0]);
    }
}
