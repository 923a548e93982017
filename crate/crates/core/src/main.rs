use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thzwave::channels::generate_cluster_ray_tdl;
use thzwave::harness::{validate_numerology, ChannelStats, ExperimentConfig, ExperimentKind, RunOptions};
use thzwave::kpi::{complexity, e2e_latency_s, spectral_efficiency};
use thzwave::rng::{Purpose, RandomStream};
use thzwave::signal::{kmh_to_mps, max_doppler_hz};
use thzwave::waveforms::{Mapping, Scheme, WaveformParams};

#[derive(Parser)]
#[command(name = "thzwave", version, about = "Link-level waveform comparison toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV files plus a manifest.
    Run(RunArgs),
    /// Check a config and its numerology without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// RMS delay spread; estimated from the channel model when omitted.
        #[arg(long)]
        tau_rms_ns: Option<f64>,
    },
    /// List experiment kinds, and config files found in a directory.
    ListExperiments {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Print spectral efficiency, latency and complexity for every scheme.
    PrintKpiTable(KpiArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; falls back to THZWAVE_OUT, then the config's output_dir.
    #[arg(long, env = "THZWAVE_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct KpiArgs {
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[arg(long, default_value_t = 48)]
    ncp: usize,
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    o: usize,
    /// DFT-s-OFDM spreading sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 64])]
    mbar: Vec<usize>,
    #[arg(long, default_value_t = 10e9)]
    fs: f64,
}

/// Appends a line to the output buffer.
macro_rules! out {
    ($buf:expr) => {
        $buf.push('\n')
    };
    ($buf:expr, $($arg:tt)*) => {{
        $buf.push_str(&format!($($arg)*));
        $buf.push('\n');
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut buf = String::new();
    let res = dispatch(cli.command, &mut buf);
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(buf.as_bytes());
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command, buf: &mut String) -> thzwave::Result<ExitCode> {
    match cmd {
        Command::Run(a) => {
            let text = std::fs::read_to_string(&a.config)?;
            let cfg = ExperimentConfig::load(&a.config)?;
            let opts = RunOptions { workers: a.workers, seed: a.seed, out_dir: a.out };
            let manifest = thzwave::harness::run_experiment(&cfg, &text, &opts)?;
            buf.push_str(&manifest.render());
            out!(buf, "output = {}", manifest.out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config, tau_rms_ns } => {
            let cfg = ExperimentConfig::load(&config)?;
            let stats = channel_stats(&cfg, tau_rms_ns)?;
            let mut ok = true;
            for s in &cfg.schemes {
                let r = validate_numerology(&s.params(cfg.bandwidth_hz), &stats);
                out!(buf, "{}:", s.label());
                buf.push_str(&r.to_string());
                ok &= r.pass();
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::ListExperiments { dir } => {
            for k in ExperimentKind::ALL {
                out!(buf, "{:<22} {}", k.name(), k.describe());
            }
            if let Some(dir) = dir {
                let mut files: Vec<_> = std::fs::read_dir(&dir)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                    .collect();
                files.sort();
                out!(buf);
                for f in files {
                    match ExperimentConfig::load(&f) {
                        Ok(c) => out!(buf, "{:<28} {:<22} {}", f.display(), c.kind.name(), c.name),
                        Err(e) => out!(buf, "{:<28} invalid: {e}", f.display()),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PrintKpiTable(a) => {
            out!(buf, "{:<22} {:>10} {:>14} {:>14} {:>16}", "scheme", "SE", "latency_s", "mults/symbol", "mults/s");
            let mut rows = Vec::new();
            for scheme in Scheme::ALL {
                let cp = if scheme == Scheme::Fbmc { 0 } else { a.ncp };
                let base = WaveformParams::new(scheme, a.m, a.n, cp, a.fs).with_overlap(a.o);
                if scheme == Scheme::DftsOfdm {
                    for &mb in &a.mbar {
                        rows.push((format!("DFT-s-OFDM (M̄={mb})"), base.clone().with_spread(mb, Mapping::Localized)));
                    }
                } else {
                    rows.push((scheme.label().to_string(), base));
                }
            }
            for (label, p) in rows {
                let c = complexity(&p)?;
                out!(buf, 
                    "{label:<22} {:>10.6} {:>14.6e} {:>14.1} {:>16.6e}",
                    spectral_efficiency(&p),
                    e2e_latency_s(&p),
                    c.per_symbol_real_mults,
                    c.per_second_real_mults
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Delay and Doppler statistics implied by the config.
fn channel_stats(cfg: &ExperimentConfig, tau_rms_ns: Option<f64>) -> thzwave::Result<ChannelStats> {
    let ts = 1.0 / cfg.bandwidth_hz;
    let ch = cfg.channel.as_ref();
    let (mut tau_rms, mut tau_max) = (0.0, 0.0);
    if let Some(c) = ch.filter(|c| c.multipath) {
        let params = thzwave::channels::ClusterRayParams {
            max_delay_s: c.max_delay_s,
            k_factor_db: c.k_factor_db,
            ..Default::default()
        };
        let draws = 64;
        for i in 0..draws {
            let mut rng = RandomStream::new(cfg.seed, i).rng(Purpose::Channel);
            let mut tdl = generate_cluster_ray_tdl(&params, ts, &mut rng)?;
            if let Some(t) = c.taps {
                tdl = tdl.truncated(t.min(tdl.taps.len()));
            }
            tau_rms += tdl.rms_delay_spread_s() / draws as f64;
            tau_max = f64::max(tau_max, (tdl.taps.len() - 1) as f64 * ts);
        }
    }
    if let Some(t) = tau_rms_ns {
        tau_rms = t * 1e-9;
    }
    let nu_max_hz = match (ch.and_then(|c| c.speed_kmh), cfg.carrier_hz) {
        (Some(v), Some(fc)) => max_doppler_hz(kmh_to_mps(v), fc),
        _ => 0.0,
    };
    Ok(ChannelStats { tau_rms_s: tau_rms, tau_max_s: tau_max, nu_max_hz })
}
