//! Channel generators and operators.

mod beam;
mod dd;
mod io;
mod tdl;

pub use beam::{array_factor, beam_split_gain, BeamSplitParams};
pub use dd::{dd_apply, dd_build_matrix, dd_effective_channel, dd_from_mobility, DdChannel, DdEffectiveChannel, DdPath};
pub use io::{read_dd_csv, read_tdl_csv, write_dd_csv, write_tdl_csv};
pub use tdl::{
    generate_cluster_ray_tdl, large_scale_gain, tdl_apply, tdl_frequency_response, ClusterRayParams, TdlChannel,
};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{config, Result};
use crate::rng::complex_gaussian;

/// Adds circularly-symmetric white Gaussian noise of `variance` per complex sample.
pub fn awgn_add(signal: &[Complex64], variance: f64, rng: &mut impl Rng) -> Result<Vec<Complex64>> {
    if !(variance >= 0.0) {
        return config(format!("noise variance {variance} must be non-negative"));
    }
    if variance == 0.0 {
        return Ok(signal.to_vec());
    }
    Ok(signal.iter().map(|&x| x + complex_gaussian(rng, variance)).collect())
}
