//! Python bindings: waveform numerology, link chains, KPIs and config-driven experiments.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use thzwave::equalization::EqualizerSpec;
use thzwave::harness::{self, Csi, ExperimentConfig, RunOptions};
use thzwave::kpi;
use thzwave::waveforms::{Mapping, Scheme};

fn err(e: thzwave::Error) -> PyErr {
    match e {
        thzwave::Error::Io(e) => PyOSError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn scheme(name: &str) -> PyResult<Scheme> {
    Ok(match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "cp_ofdm" | "ofdm" => Scheme::CpOfdm,
        "sc_fde" => Scheme::ScFde,
        "dfts_ofdm" | "dft_s_ofdm" => Scheme::DftsOfdm,
        "fbmc" | "oqam_fbmc" => Scheme::Fbmc,
        "otfs" => Scheme::Otfs,
        _ => return Err(PyValueError::new_err(format!("unknown scheme {name:?}"))),
    })
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::CpOfdm => "cp_ofdm",
        Scheme::ScFde => "sc_fde",
        Scheme::DftsOfdm => "dfts_ofdm",
        Scheme::Fbmc => "fbmc",
        Scheme::Otfs => "otfs",
    }
}

/// Numerology of one waveform instance.
#[pyclass(name = "WaveformParams", from_py_object)]
#[derive(Clone)]
struct PyParams(thzwave::waveforms::WaveformParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (scheme, m, n, cp_len=0, sample_rate_hz=1e9, spread_len=None, mapping="localized", overlap=4))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        scheme: &str,
        m: usize,
        n: usize,
        cp_len: usize,
        sample_rate_hz: f64,
        spread_len: Option<usize>,
        mapping: &str,
        overlap: usize,
    ) -> PyResult<Self> {
        let mapping = match mapping {
            "localized" => Mapping::Localized,
            "distributed" => Mapping::Distributed,
            _ => return Err(PyValueError::new_err(format!("unknown mapping {mapping:?}"))),
        };
        let p = thzwave::waveforms::WaveformParams::new(self::scheme(scheme)?, m, n, cp_len, sample_rate_hz)
            .with_spread(spread_len.unwrap_or(m), mapping)
            .with_overlap(overlap);
        p.validate().map_err(err)?;
        Ok(Self(p))
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        scheme_name(self.0.scheme)
    }
    #[getter]
    fn m(&self) -> usize {
        self.0.m
    }
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }
    #[getter]
    fn cp_len(&self) -> usize {
        self.0.cp_len
    }

    fn symbols_per_frame(&self) -> usize {
        self.0.symbols_per_frame()
    }

    fn frame_len(&self) -> usize {
        self.0.frame_len()
    }

    fn spectral_efficiency(&self) -> f64 {
        kpi::spectral_efficiency(&self.0)
    }

    fn latency_s(&self) -> f64 {
        kpi::e2e_latency_s(&self.0)
    }

    /// Real multiplications as `(per_symbol, per_second)`.
    fn complexity(&self) -> PyResult<(f64, f64)> {
        let c = kpi::complexity(&self.0).map_err(err)?;
        Ok((c.per_symbol_real_mults, c.per_second_real_mults))
    }

    fn __repr__(&self) -> String {
        format!("WaveformParams({}, m={}, n={}, cp_len={})", scheme_name(self.0.scheme), self.0.m, self.0.n, self.0.cp_len)
    }
}

/// Transmit and receive chain for one scheme with QAM mapping.
#[pyclass(name = "Link")]
struct PyLink(harness::Link);

#[pymethods]
impl PyLink {
    #[new]
    #[pyo3(signature = (params, qam_order=4))]
    fn new(params: PyParams, qam_order: usize) -> PyResult<Self> {
        Ok(Self(harness::Link::new(params.0, qam_order).map_err(err)?))
    }

    fn bits_per_frame(&self) -> usize {
        self.0.bits_per_frame()
    }

    fn modulate(&self, bits: Vec<u8>) -> PyResult<Vec<Complex64>> {
        self.0.qam.modulate(&bits).map_err(err)
    }

    fn demodulate(&self, symbols: Vec<Complex64>) -> Vec<u8> {
        self.0.qam.demodulate(&symbols)
    }

    fn transmit(&self, symbols: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.0.transmit(&symbols).map_err(err)
    }

    /// Symbol estimates after a channel with impulse response `taps` (unit gain when omitted).
    #[pyo3(signature = (rx, taps=None, noise_variance=0.0))]
    fn receive(&self, rx: Vec<Complex64>, taps: Option<Vec<Complex64>>, noise_variance: f64) -> PyResult<Vec<Complex64>> {
        let eq = if noise_variance > 0.0 { EqualizerSpec::mmse(noise_variance) } else { EqualizerSpec::zf() };
        match taps {
            None => self.0.receive(&rx, &Csi::Flat, &eq, None),
            Some(h) => {
                let f = move |nu: f64| {
                    h.iter()
                        .enumerate()
                        .map(|(l, g)| g * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * nu * l as f64))
                        .sum()
                };
                self.0.receive(&rx, &Csi::Frequency(&f), &eq, None)
            }
        }
        .map_err(err)
    }
}

/// A parsed experiment file.
#[pyclass(name = "Experiment")]
struct PyExperiment {
    cfg: ExperimentConfig,
    text: String,
}

#[pymethods]
impl PyExperiment {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Ok(Self { cfg: ExperimentConfig::load(&path).map_err(err)?, text })
    }

    #[staticmethod]
    fn parse(text: String) -> PyResult<Self> {
        Ok(Self { cfg: ExperimentConfig::parse(&text).map_err(err)?, text })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.cfg.name
    }
    #[getter]
    fn kind(&self) -> &'static str {
        self.cfg.kind.name()
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.cfg.seed
    }
    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.cfg.seed = seed;
    }
    #[getter]
    fn trials(&self) -> usize {
        self.cfg.trials.get()
    }
    #[setter]
    fn set_trials(&mut self, trials: usize) -> PyResult<()> {
        self.cfg.trials = trials.try_into().map_err(|_| PyValueError::new_err("trials must be positive"))?;
        Ok(())
    }

    /// Rows of `(scheme, snr_db, ber, ci_low, ci_high, bits, errors)`.
    fn run_ber(&self, py: Python<'_>) -> PyResult<Vec<(String, f64, f64, f64, f64, u64, u64)>> {
        let rows = py.detach(|| harness::run_ber(&self.cfg)).map_err(err)?;
        Ok(rows
            .into_iter()
            .map(|r| {
                let (lo, hi) = r.counter.ci95();
                (r.scheme, r.snr_db, r.counter.ber(), lo, hi, r.counter.bits, r.counter.errors)
            })
            .collect())
    }

    /// PAPR samples in dB per scheme label.
    fn run_papr(&self, py: Python<'_>) -> PyResult<BTreeMap<String, Vec<f64>>> {
        let s = py.detach(|| harness::run_papr(&self.cfg)).map_err(err)?;
        Ok(s.into_iter().map(|s| (s.scheme, s.samples_db)).collect())
    }

    /// Rows of `(scheme, spectral_efficiency, latency_s, mults_per_symbol, mults_per_second)`.
    fn run_kpi(&self) -> PyResult<Vec<(String, f64, f64, f64, f64)>> {
        let rows = harness::run_kpi(&self.cfg).map_err(err)?;
        Ok(rows
            .into_iter()
            .map(|r| {
                let c = r.complexity;
                (r.scheme, r.spectral_efficiency, r.latency_s, c.per_symbol_real_mults, c.per_second_real_mults)
            })
            .collect())
    }

    /// Output files (CSV text) keyed by file name, without touching the disk.
    fn artifacts(&self, py: Python<'_>) -> PyResult<BTreeMap<String, String>> {
        let a = py.detach(|| harness::experiment_artifacts(&self.cfg)).map_err(err)?;
        Ok(a.into_iter().map(|a| (a.file_name, String::from_utf8_lossy(&a.contents).into_owned())).collect())
    }

    /// Runs the experiment, writes its files and returns the manifest text.
    #[pyo3(signature = (out_dir=None, workers=None))]
    fn run(&self, py: Python<'_>, out_dir: Option<PathBuf>, workers: Option<usize>) -> PyResult<String> {
        let opts = RunOptions { workers, seed: None, out_dir };
        let m = py.detach(|| harness::run_experiment(&self.cfg, &self.text, &opts)).map_err(err)?;
        Ok(m.render())
    }
}

#[pyfunction]
fn papr_db(signal: Vec<Complex64>) -> PyResult<f64> {
    kpi::papr_db(&signal).map_err(err)
}

#[pyfunction]
fn ccdf(samples_db: Vec<f64>, thresholds_db: Vec<f64>) -> Vec<f64> {
    kpi::ccdf(&samples_db, &thresholds_db).probabilities
}

#[pyfunction]
fn papr_ccdf_theory(scheme: &str, m: usize, n: usize, thresholds_db: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(kpi::papr_ccdf_theory(self::scheme(scheme)?, m, n, &thresholds_db).map_err(err)?.probabilities)
}

#[pyfunction]
fn papr_max_otfs_db(n: usize) -> f64 {
    kpi::papr_max_otfs_db(n)
}

/// `(ber, ci_low, ci_high)` with a 95 % Wilson interval.
#[pyfunction]
fn ber_interval(errors: u64, bits: u64) -> (f64, f64, f64) {
    let c = kpi::BerCounter::new(errors, bits);
    let (lo, hi) = c.ci95();
    (c.ber(), lo, hi)
}

#[pyfunction]
fn coherence_bandwidth_hz(tau_rms_s: f64) -> f64 {
    harness::coherence_bandwidth_hz(tau_rms_s)
}

#[pyfunction]
fn coherence_time_s(nu_max_hz: f64) -> f64 {
    harness::coherence_time_s(nu_max_hz)
}

#[pyfunction]
fn max_doppler_hz(speed_kmh: f64, carrier_hz: f64) -> f64 {
    thzwave::signal::max_doppler_hz(thzwave::signal::kmh_to_mps(speed_kmh), carrier_hz)
}

#[pymodule]
fn thzwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyLink>()?;
    m.add_class::<PyExperiment>()?;
    m.add_function(wrap_pyfunction!(papr_db, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf, m)?)?;
    m.add_function(wrap_pyfunction!(papr_ccdf_theory, m)?)?;
    m.add_function(wrap_pyfunction!(papr_max_otfs_db, m)?)?;
    m.add_function(wrap_pyfunction!(ber_interval, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_bandwidth_hz, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_time_s, m)?)?;
    m.add_function(wrap_pyfunction!(max_doppler_hz, m)?)?;
    Ok(())
}
