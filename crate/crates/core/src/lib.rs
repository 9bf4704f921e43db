//! Linearly solvable continuous-time optimal control on finite directed graphs.
//!
//! An agent moves on a directed graph and controls its jump intensities. When
//! the running cost has the entropy form
//! `L(i, λ) = -r(i) + Σ_j (λ_ij log λ_ij + b_ij λ_ij)`, the substitution
//! `w = exp(u)` turns the nonlinear Hamilton–Jacobi system into the linear
//! system `dw/dt = -B w`. This crate provides:
//!
//! * [`problem`]: problem instances, validation, JSON documents, connectivity.
//! * [`numerics`]: matrix exponential, log-scaled propagation, power iteration.
//! * [`hjb`]: the Hamiltonian, the matrix `B`, the closed-form value function
//!   and the optimal feedback intensities.
//! * [`oracle`]: an independent RK4 integrator of the nonlinear system.
//! * [`ergodic`]: the ergodic constant and long-horizon limits for strongly
//!   connected graphs.
//! * [`sim`]: a Monte Carlo simulator of the controlled chain and a
//!   deterministic policy evaluator.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The type
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ergodic;
pub mod error;
pub mod hjb;
pub mod numerics;
pub mod oracle;
pub mod problem;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use ergodic::{ErgodicResult, PerronData};
pub use hjb::{EdgeIntensities, TransitionMatrix, ValueSolution};
pub use numerics::{DenseMatrix, EigenPair, ScaledPositiveVector};
pub use oracle::OracleSolution;
pub use problem::{ConnectivityReport, Edge, GraphProblem};
pub use sim::{
    ConstantPolicy, IntensityPolicy, OptimalPolicy, PathRecord, SimulationEstimate, TabulatedPolicy,
};

pub type Problem = GraphProblem<f64>;
pub type Matrix = DenseMatrix<f64>;
pub type Solution = ValueSolution<f64>;
pub type Intensities = EdgeIntensities<f64>;
pub type Ergodic = ErgodicResult<f64>;
pub type Estimate = SimulationEstimate<f64>;

pub type ProblemF32 = GraphProblem<f32>;
pub type SolutionF32 = ValueSolution<f32>;
