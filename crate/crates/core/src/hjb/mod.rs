//! Hamiltonian, the linearizing matrix `B`, closed-form value function and
//! optimal feedback intensities.

mod intensities;
mod value;

pub use intensities::EdgeIntensities;
pub use value::{
    default_steps, hj_residual, hj_residual_bound, optimal_policy_at, solve_value_function,
    uniform_grid, ValueSolution,
};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::problem::GraphProblem;
use crate::scalar::{xlogx, Scalar};

/// `B_ij = e^{-1-b_ij}` on edges, `B_ii = r(i)`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    matrix: DenseMatrix<T>,
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.matrix
    }
}

/// Edge weight `e^{-1-b}`.
pub fn edge_weight<T: Scalar>(b: T) -> T {
    (-T::one() - b).exp()
}

/// Maximizing intensity `e^{-1-b+p}` for an edge with offset `b` and
/// value jump `p`.
pub fn optimal_rate<T: Scalar>(b: T, p: T) -> T {
    (p - T::one() - b).exp()
}

pub fn build_generator_matrix<T: Scalar>(p: &GraphProblem<T>) -> TransitionMatrix<T> {
    let mut matrix = DenseMatrix::from_diag(p.rewards());
    for e in p.edges() {
        matrix[(e.from, e.to)] = edge_weight(e.b);
    }
    TransitionMatrix { matrix }
}

/// Running cost `L(i, λ) = -r(i) + Σ_j (λ_j log λ_j + b_ij λ_j)`, with
/// `λ` aligned with `neighbors(i)` and `0 log 0 = 0`.
pub fn running_cost<T: Scalar>(p: &GraphProblem<T>, i: usize, lambda: &[T]) -> T {
    debug_assert_eq!(lambda.len(), p.neighbors(i).len());
    let entropy: T = lambda
        .iter()
        .zip(p.offsets(i))
        .map(|(&l, &b)| xlogx(l) + b * l)
        .sum();
    entropy - p.rewards()[i]
}

fn check_momenta<T: Scalar>(p: &GraphProblem<T>, i: usize, pvec: &[T]) -> Result<()> {
    let n = p.n_nodes();
    if i >= n {
        return Err(Error::IndexOutOfRange {
            what: "node",
            index: i,
            n,
        });
    }
    if pvec.len() != p.neighbors(i).len() {
        return Err(Error::LengthMismatch {
            field: "p",
            expected: p.neighbors(i).len(),
            found: pvec.len(),
        });
    }
    if let Some(slot) = pvec.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue(format!("p[{slot}]")));
    }
    Ok(())
}

/// Maximizer of `Σ_j λ_j p_j - L(i, λ)` over `λ ≥ 0`, aligned with `neighbors(i)`.
pub fn argmax_intensities<T: Scalar>(p: &GraphProblem<T>, i: usize, pvec: &[T]) -> Result<Vec<T>> {
    check_momenta(p, i, pvec)?;
    pvec.iter()
        .zip(p.offsets(i))
        .enumerate()
        .map(|(slot, (&pj, &b))| {
            let l = optimal_rate(b, pj);
            if l.is_finite() {
                Ok(l)
            } else {
                Err(Error::Overflow(slot))
            }
        })
        .collect()
}

/// `H(i, p) = r(i) + Σ_j e^{-1-b_ij} e^{p_j}`, the maximum of
/// `Σ_j λ_j p_j - L(i, λ)`.
pub fn hamiltonian<T: Scalar>(p: &GraphProblem<T>, i: usize, pvec: &[T]) -> Result<T> {
    let rates = argmax_intensities(p, i, pvec)?;
    let h = p.rewards()[i] + rates.iter().copied().sum::<T>();
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::Overflow(rates.len()))
    }
}
