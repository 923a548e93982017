//! Declarative experiment runner.

mod config;
mod experiments;
mod link;
mod numerology;
mod output;

pub use config::{
    BeamConfig, ChannelConfig, ExperimentConfig, ExperimentKind, PaprConfig, PhaseNoiseConfig, PsdConfig,
    PulseShapingConfig, SchemeConfig, SnrDefinition, Sweep,
};
pub use experiments::{papr_windows, run_ber, run_kpi, run_papr, run_psd, BerRow, KpiRow, PaprSamples, PsdResult};
pub use link::{Csi, Link};
pub use numerology::{
    coherence_bandwidth_hz, coherence_time_s, validate_numerology, ChannelStats, Check, NumerologyReport,
    COHERENCE_MARGIN,
};
pub use output::{experiment_artifacts, run_experiment, with_workers, Artifact, RunManifest, RunOptions};
