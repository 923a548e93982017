pub mod dft;
pub mod error;
pub mod linalg;
pub mod qam;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod channels;
pub mod waveforms;
pub mod equalization;
pub mod impairments;
pub mod kpi;
pub mod harness;
