//! Dense kernels: matrix exponential, log-scaled propagation of positive
//! vectors, and power iteration.

mod expm;
mod matrix;
mod power;
mod propagate;

pub use expm::expm;
pub use matrix::DenseMatrix;
pub use power::{power_iteration, EigenPair, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use propagate::{propagate, propagate_tracked, ScaledPositiveVector};
