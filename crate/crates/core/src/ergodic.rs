//! Long-horizon behavior on strongly connected graphs.
//!
//! With `σ > -min r`, `B + σI` is nonnegative, irreducible and has a positive
//! diagonal, so its Perron root `ρ(σ)` is simple with positive right and left
//! vectors `f`, `φ`. The ergodic constant is `γ = ρ(σ) - σ`, and as `T → ∞`
//!
//! * `u_i(t) - γ (T - t) → α + log f_i` with `α = log(⟨φ, e^g⟩ / ⟨φ, f⟩)`,
//! * `λ*(i, j) → e^{-1-b_ij} f_j / f_i`.

use crate::error::{Error, Result};
use crate::hjb::{build_generator_matrix, edge_weight, EdgeIntensities};
use crate::numerics::{power_iteration, EigenPair, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::problem::{strong_connectivity, GraphProblem};
use crate::scalar::Scalar;

/// Perron data of `B`, before the offset `α` is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData<T> {
    pub gamma: T,
    /// Right Perron vector, unit max-norm.
    pub f: Vec<T>,
    /// Left Perron vector, unit max-norm.
    pub phi: Vec<T>,
    pub sigma: T,
    pub right: EigenPair<T>,
    pub left: EigenPair<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicResult<T> {
    pub gamma: T,
    pub f: Vec<T>,
    pub phi: Vec<T>,
    pub alpha: T,
    pub sigma: T,
    pub asymptotic_intensities: EdgeIntensities<T>,
}

impl<T: Scalar> ErgodicResult<T> {
    /// `α + log f_i`, the limit of `u_i(t) - γ (T - t)`.
    pub fn limit_offset(&self, i: usize) -> T {
        self.alpha + self.f[i].ln()
    }
}

/// `σ = 1 + max(0, -min_i r(i))`.
pub fn choose_shift<T: Scalar>(p: &GraphProblem<T>) -> T {
    let min_r = p.rewards().iter().copied().fold(T::infinity(), T::min);
    T::one() + T::zero().max(-min_r)
}

pub fn perron_data<T: Scalar>(p: &GraphProblem<T>) -> Result<PerronData<T>> {
    perron_data_with_shift(p, choose_shift(p), T::c(DEFAULT_TOL), DEFAULT_MAX_ITER)
}

/// As [`perron_data`] with an explicit shift; `σ` must exceed `-min r`.
pub fn perron_data_with_shift<T: Scalar>(
    p: &GraphProblem<T>,
    sigma: T,
    tol: T,
    max_iter: usize,
) -> Result<PerronData<T>> {
    if !strong_connectivity(p).strongly_connected {
        return Err(Error::NotStronglyConnected);
    }
    let min_r = p.rewards().iter().copied().fold(T::infinity(), T::min);
    if !(sigma > -min_r) || !sigma.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "shift {sigma} must exceed {}",
            -min_r
        )));
    }
    let shifted = build_generator_matrix(p).into_matrix().shifted(sigma);
    let right = power_iteration(&shifted, tol, max_iter)?;
    let left = power_iteration(&shifted.transpose(), tol, max_iter)?;
    // Two-sided quotient: error is the product of the two residuals.
    let mf = shifted.mul_vec(&right.vector);
    let num: T = left.vector.iter().zip(&mf).map(|(&a, &b)| a * b).sum();
    let den: T = left
        .vector
        .iter()
        .zip(&right.vector)
        .map(|(&a, &b)| a * b)
        .sum();
    Ok(PerronData {
        gamma: num / den - sigma,
        f: right.vector.clone(),
        phi: left.vector.clone(),
        sigma,
        right,
        left,
    })
}

/// `α = log β` with `β = ⟨φ, e^g⟩ / ⟨φ, f⟩`, evaluated with the largest
/// `g` factored out.
pub fn asymptotic_offset<T: Scalar>(p: &GraphProblem<T>, data: &PerronData<T>) -> Result<T> {
    let g = p.terminal_rewards();
    let m = g.iter().copied().fold(T::neg_infinity(), T::max);
    let num: T = data
        .phi
        .iter()
        .zip(g)
        .map(|(&phi, &gi)| phi * (gi - m).exp())
        .sum();
    let den: T = data.phi.iter().zip(&data.f).map(|(&a, &b)| a * b).sum();
    if !(num > T::zero()) || !(den > T::zero()) || !num.is_finite() || !den.is_finite() {
        return Err(Error::InternalPositivityViolation(format!(
            "beta numerator {num}, denominator {den}"
        )));
    }
    Ok(m + num.ln() - den.ln())
}

/// `λ∞(i, j) = e^{-1-b_ij} f_j / f_i`.
pub fn asymptotic_policy<T: Scalar>(p: &GraphProblem<T>, f: &[T]) -> EdgeIntensities<T> {
    let rows = (0..p.n_nodes())
        .map(|i| {
            p.neighbors(i)
                .iter()
                .zip(p.offsets(i))
                .map(|(&j, &b)| edge_weight(b) * f[j] / f[i])
                .collect()
        })
        .collect();
    EdgeIntensities::from_rows_unchecked(rows)
}

/// Full ergodic analysis with the default shift and tolerances.
pub fn analyze<T: Scalar>(p: &GraphProblem<T>) -> Result<ErgodicResult<T>> {
    let data = perron_data(p)?;
    let alpha = asymptotic_offset(p, &data)?;
    let asymptotic_intensities = asymptotic_policy(p, &data.f);
    Ok(ErgodicResult {
        gamma: data.gamma,
        f: data.f,
        phi: data.phi,
        alpha,
        sigma: data.sigma,
        asymptotic_intensities,
    })
}
