//! CSV artifacts and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, ExperimentKind};
use super::experiments::{run_ber, run_kpi, run_papr, run_psd};
use crate::error::{Error, Result};
use crate::kpi::{ccdf, papr_ccdf_theory};
use crate::waveforms::Scheme;

/// One output file held in memory until the run succeeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn sha256(&self) -> String {
        hex(&Sha256::digest(&self.contents))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn csv_artifact(name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Artifact> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let contents = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(Artifact { file_name: name.to_string(), contents })
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Runs the experiment on the current rayon pool and renders its CSV files.
pub fn experiment_artifacts(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    match cfg.kind {
        ExperimentKind::BerAwgnPhn | ExperimentKind::BerBeamSplit | ExperimentKind::BerDoublySelective => {
            let rows = run_ber(cfg)?;
            Ok(vec![csv_artifact(
                "ber.csv",
                &["scheme", "snr_db", "ber", "ci_low", "ci_high", "bits", "errors"],
                rows.iter().map(|r| {
                    let (lo, hi) = r.counter.ci95();
                    vec![
                        r.scheme.clone(),
                        num(r.snr_db),
                        num(r.counter.ber()),
                        num(lo),
                        num(hi),
                        r.counter.bits.to_string(),
                        r.counter.errors.to_string(),
                    ]
                }),
            )?])
        }
        ExperimentKind::PaprCcdf => {
            let thresholds = cfg.papr.as_ref().expect("validated papr table").thresholds_db.points();
            let samples = run_papr(cfg)?;
            let mut rows = Vec::new();
            for s in &samples {
                let c = ccdf(&s.samples_db, &thresholds);
                rows.extend(c.thresholds_db.iter().zip(&c.probabilities).map(|(t, p)| vec![s.scheme.clone(), num(*t), num(*p)]));
            }
            // closed-form reference curves at Nyquist rate
            if cfg.papr.as_ref().is_some_and(|p| p.pulse_shaping.is_none()) {
                for e in cfg.schemes.iter().filter(|e| matches!(e.scheme, Scheme::CpOfdm | Scheme::Otfs)) {
                    let c = papr_ccdf_theory(e.scheme, e.m, e.n, &thresholds)?;
                    let name = format!("{} (theory)", e.label());
                    rows.extend(c.thresholds_db.iter().zip(&c.probabilities).map(|(t, p)| vec![name.clone(), num(*t), num(*p)]));
                }
            }
            Ok(vec![csv_artifact("ccdf.csv", &["scheme", "threshold_db", "probability"], rows)?])
        }
        ExperimentKind::PsdOob => {
            let res = run_psd(cfg)?;
            let fc = cfg.carrier_hz.unwrap_or(0.0);
            let mut psd_rows = Vec::new();
            for r in &res {
                let peak = r.composite.peak();
                for (f, d) in r.composite.freqs_hz.iter().zip(&r.composite.density) {
                    psd_rows.push(vec![r.scheme.clone(), num(fc + f), num(10.0 * (d / peak).max(1e-300).log10())]);
                }
            }
            let mask_rows = res.iter().map(|r| {
                vec![
                    r.scheme.clone(),
                    num(r.mask.worst_margin_db),
                    num(fc + r.mask.worst_freq_hz),
                    r.mask.violations.len().to_string(),
                    r.mask.pass().to_string(),
                    num(r.sidelobe_dbr),
                ]
            });
            Ok(vec![
                csv_artifact("psd.csv", &["scheme", "freq_hz", "psd_db"], psd_rows)?,
                csv_artifact(
                    "mask.csv",
                    &["scheme", "worst_margin_db", "worst_freq_hz", "violations", "pass", "sidelobe_dbr"],
                    mask_rows,
                )?,
            ])
        }
        ExperimentKind::KpiTables => {
            let rows = run_kpi(cfg)?;
            Ok(vec![csv_artifact(
                "kpi.csv",
                &["scheme", "se", "latency_s", "mults_per_s", "mults_per_symbol"],
                rows.iter().map(|r| {
                    vec![
                        r.scheme.clone(),
                        num(r.spectral_efficiency),
                        num(r.latency_s),
                        num(r.complexity.per_second_real_mults),
                        num(r.complexity.per_symbol_real_mults),
                    ]
                }),
            )?])
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub experiment: String,
    pub kind: ExperimentKind,
    pub config_sha256: String,
    pub seed: u64,
    pub files: Vec<(String, String)>,
    pub wall_clock_s: f64,
    pub version: String,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "config_sha256 = {}", self.config_sha256);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "wall_clock_s = {:.3}", self.wall_clock_s);
        for (f, h) in &self.files {
            let _ = writeln!(s, "sha256 {f} = {h}");
        }
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    let pool = b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs an experiment and writes its CSV files and `manifest.txt`. Nothing is
/// written unless the whole run succeeds.
pub fn run_experiment(cfg: &ExperimentConfig, config_text: &str, opts: &RunOptions) -> Result<RunManifest> {
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(|p| cfg.resolve(p)))
        .unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
    let t0 = Instant::now();
    let artifacts = with_workers(opts.workers, || experiment_artifacts(&cfg))??;
    write_artifacts(&out_dir, &artifacts)?;
    let manifest = RunManifest {
        experiment: cfg.name.clone(),
        kind: cfg.kind,
        config_sha256: hex(&Sha256::digest(config_text.as_bytes())),
        seed: cfg.seed,
        files: artifacts.iter().map(|a| (a.file_name.clone(), a.sha256())).collect(),
        wall_clock_s: t0.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        out_dir: out_dir.clone(),
    };
    std::fs::write(out_dir.join("manifest.txt"), manifest.render())?;
    Ok(manifest)
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.file_name), &a.contents)?;
    }
    Ok(())
}
