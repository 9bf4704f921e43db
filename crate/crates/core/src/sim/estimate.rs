use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;
use crate::sim::path::path_objective;
use crate::sim::IntensityPolicy;

/// Monte Carlo estimate of the expected objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationEstimate<T> {
    pub mean: T,
    /// Sample standard deviation over `sqrt(n_paths)`.
    pub stderr: T,
    pub n_paths: usize,
    #[serde(rename = "seed")]
    pub master_seed: u64,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of path `index` under `master_seed`.
pub fn derive_path_seed(master_seed: u64, index: u64) -> u64 {
    mix(master_seed.wrapping_add(mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

/// Runs `n_paths` independent paths in parallel. The reduction is over path
/// index order, so the result is bit-identical for a given `master_seed`
/// regardless of thread scheduling.
pub fn estimate_objective<T: Scalar, P: IntensityPolicy<T> + ?Sized>(
    p: &GraphProblem<T>,
    pol: &P,
    i0: usize,
    n_paths: usize,
    master_seed: u64,
    n_time_steps: usize,
) -> Result<SimulationEstimate<T>> {
    if n_paths < 2 {
        return Err(Error::InvalidArgument("n_paths must be at least 2".into()));
    }
    let objectives = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| path_objective(p, pol, i0, derive_path_seed(master_seed, k), n_time_steps))
        .collect::<Result<Vec<T>>>()?;

    // Shifted sums: identical samples give their exact value and zero spread.
    let x0 = objectives[0];
    let n = T::from_usize_lossy(n_paths);
    let shift_mean = objectives.iter().map(|&x| x - x0).sum::<T>() / n;
    let ss: T = objectives
        .iter()
        .map(|&x| {
            let d = x - x0 - shift_mean;
            d * d
        })
        .sum();
    let var = ss / (n - T::one());
    Ok(SimulationEstimate {
        mean: x0 + shift_mean,
        stderr: (var / n).sqrt(),
        n_paths,
        master_seed,
    })
}
