//! CSV round-trips for channel realizations.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

use super::dd::{DdChannel, DdPath};
use super::tdl::TdlChannel;

#[derive(Serialize, Deserialize)]
struct TapRow {
    delay_s: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PathRow {
    delay: usize,
    doppler: i64,
    re: f64,
    im: f64,
}

pub fn write_tdl_csv(tdl: &TdlChannel, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (l, h) in tdl.taps.iter().enumerate() {
        w.serialize(TapRow { delay_s: l as f64 * tdl.sample_period_s, re: h.re, im: h.im })?;
    }
    w.flush()?;
    Ok(())
}

/// Taps must sit on a uniform grid starting at zero delay.
pub fn read_tdl_csv(path: &Path, sample_period_s: f64) -> Result<TdlChannel> {
    let mut r = csv::Reader::from_path(path)?;
    let mut taps = Vec::new();
    for (i, row) in r.deserialize::<TapRow>().enumerate() {
        let row = row?;
        let idx = row.delay_s / sample_period_s;
        if (idx - i as f64).abs() > 1e-6 {
            return config(format!("tap {i} at {} s is off the {sample_period_s} s grid", row.delay_s));
        }
        taps.push(Complex64::new(row.re, row.im));
    }
    Ok(TdlChannel::new(taps, sample_period_s))
}

pub fn write_dd_csv(ch: &DdChannel, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in ch.paths() {
        w.serialize(PathRow { delay: p.delay, doppler: p.doppler, re: p.gain.re, im: p.gain.im })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dd_csv(path: &Path, m: usize, n: usize) -> Result<DdChannel> {
    let mut r = csv::Reader::from_path(path)?;
    let mut paths = Vec::new();
    for row in r.deserialize::<PathRow>() {
        let row = row?;
        paths.push(DdPath { gain: Complex64::new(row.re, row.im), delay: row.delay, doppler: row.doppler });
    }
    DdChannel::new(m, n, paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let tdl = TdlChannel::new(vec![Complex64::new(0.6, -0.1), Complex64::new(0.0, 0.3)], 2e-9);
        let p = dir.path().join("tdl.csv");
        write_tdl_csv(&tdl, &p).unwrap();
        assert_eq!(read_tdl_csv(&p, 2e-9).unwrap(), tdl);
        let dd = DdChannel::new(
            8,
            4,
            vec![DdPath { gain: Complex64::new(0.1, 0.2), delay: 3, doppler: -1 }],
        )
        .unwrap();
        let p = dir.path().join("dd.csv");
        write_dd_csv(&dd, &p).unwrap();
        assert_eq!(read_dd_csv(&p, 8, 4).unwrap(), dd);
    }
}
