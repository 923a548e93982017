use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use thzwave::harness::ExperimentConfig;
use thzwave::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thzwave"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &str = r#"
name = "small"
kind = "ber_awgn_phn"
seed = 3
trials = 3
bandwidth_hz = 1e9
snr_db = { start = 0, stop = 10, step = 5 }

[phase_noise]
model = "gaussian"
sigma_g2 = 0.01

[[schemes]]
scheme = "cp_ofdm"
m = 64
n = 4
cp_len = 8

[[schemes]]
scheme = "otfs"
m = 64
n = 4
cp_len = 8
"#;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("exp.toml");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn every_committed_config_parses() {
    let mut n = 0;
    for e in std::fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 10);
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    let bad = SMALL.replace("cp_len = 8\n\n[[schemes]]", "cp_len = 8\nguard = 2\n\n[[schemes]]");
    match ExperimentConfig::parse(&bad) {
        Err(Error::Schema { path, msg }) => {
            assert!(path.starts_with("schemes[0]"), "{path}");
            assert!(msg.contains("guard"), "{msg}");
        }
        other => panic!("expected a schema error, got {other:?}"),
    }
    assert!(ExperimentConfig::parse(&SMALL.replace("kind = \"ber_awgn_phn\"", "kind = \"ber\"")).is_err());
}

#[test]
fn run_writes_csvs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("res");
    let o = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).args(["--workers", "2"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ber = std::fs::read_to_string(out.join("ber.csv")).unwrap();
    let mut lines = ber.lines();
    assert_eq!(lines.next().unwrap(), "scheme,snr_db,ber,ci_low,ci_high,bits,errors");
    assert_eq!(lines.count(), 6);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 3"));
    assert!(manifest.contains("sha256 ber.csv = "));

    // Seed override changes the data; the same seed reproduces it.
    let again = dir.path().join("again");
    let o = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&again).args(["--seed", "3"]).output().unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(again.join("ber.csv")).unwrap(), ber.as_bytes());
}

#[test]
fn failures_exit_nonzero_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("cp_len = 8", "cp_len = 64"));
    let out = dir.path().join("res");
    let o = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert!(!out.exists());
}

#[test]
fn validate_reports_checks() {
    let o = bin().args(["validate", "--config"]).arg(configs().join("fig9b.toml")).output().unwrap();
    assert!(o.status.success());
    assert!(text(&o).contains("[pass] cyclic prefix covers delay spread"));
    // A delay spread longer than the prefix fails the first check.
    let o = bin()
        .args(["validate", "--config"])
        .arg(configs().join("fig9b.toml"))
        .args(["--tau-rms-ns", "5"])
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(text(&o).contains("[FAIL] cyclic prefix covers delay spread"));
}

#[test]
fn kpi_table_and_listing() {
    let o = bin().arg("print-kpi-table").output().unwrap();
    assert!(o.status.success());
    let t = text(&o);
    let ofdm = t.lines().find(|l| l.starts_with("CP-OFDM")).unwrap();
    assert!(ofdm.contains("0.842105") && ofdm.contains("9.728000e-7") && ofdm.contains("2500.0"));
    let o = bin().args(["list-experiments", "--dir"]).arg(configs()).output().unwrap();
    let t = text(&o);
    assert!(t.contains("ber_doubly_selective") && t.contains("fig10b_500kmh"));
}
