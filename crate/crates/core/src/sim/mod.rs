//! Monte Carlo simulation of the controlled chain and deterministic policy
//! evaluation.

mod estimate;
mod evaluate;
mod path;
mod policy;

pub use estimate::{derive_path_seed, estimate_objective, SimulationEstimate};
pub use evaluate::{evaluate_fixed_policy, evaluate_policy, frozen_policy_bias};
pub use path::{default_time_steps, sample_path, PathRecord};
pub use policy::{ConstantPolicy, IntensityPolicy, OptimalPolicy, TabulatedPolicy};
