use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::problem::tarjan_scc;
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Dominant eigenpair of a nonnegative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Strictly positive, unit max-norm.
    pub vector: Vec<T>,
    /// `‖M v - value v‖∞` at the returned pair.
    pub residual: T,
    pub iterations: usize,
}

/// Perron root and vector of a nonnegative irreducible matrix with strictly
/// positive diagonal.
///
/// Iterates `v ← M v / ‖M v‖∞` from the all-ones vector until
/// `‖M v - λ v‖∞ ≤ max(tol, floor)` with `λ = ‖M v‖∞`, where `floor` is the
/// rounding level `8 n ε ‖M‖∞` of a single product. Each component must also
/// settle relatively, `|(M v)_i / (λ v_i) - 1| ≤ max(tol, 8 n ε)`, so small
/// entries of the Perron vector carry full relative accuracy.
pub fn power_iteration<T: Scalar>(
    m: &DenseMatrix<T>,
    tol: T,
    max_iter: usize,
) -> Result<EigenPair<T>> {
    let n = m.n();
    check_primitive(m)?;

    let floor = T::c(8.0) * T::from_usize_lossy(n) * T::epsilon() * m.norm_inf();
    let target = tol.max(floor);
    let rel_target = tol.max(T::c(8.0) * T::from_usize_lossy(n) * T::epsilon());
    let mut v = vec![T::one(); n];
    for iter in 1..=max_iter {
        let mv = m.mul_vec(&v);
        let lambda = mv.iter().copied().fold(T::zero(), T::max);
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::PreconditionViolated("iterate collapsed".into()));
        }
        let residual = mv
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a - lambda * b).abs())
            .fold(T::zero(), T::max);
        let rel = mv
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a / (lambda * b) - T::one()).abs())
            .fold(T::zero(), T::max);
        let next: Vec<T> = mv.iter().map(|&x| x / lambda).collect();
        if next.iter().any(|&x| !(x > T::zero())) {
            return Err(Error::PreconditionViolated("iterate collapsed".into()));
        }
        if residual <= target && rel <= rel_target {
            // Report the pair that was actually checked.
            return Ok(EigenPair {
                value: lambda,
                vector: v,
                residual,
                iterations: iter,
            });
        }
        v = next;
    }
    Err(Error::NoConvergence(max_iter))
}

fn check_primitive<T: Scalar>(m: &DenseMatrix<T>) -> Result<()> {
    let n = m.n();
    if n == 0 {
        return Err(Error::PreconditionViolated("empty matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("power iteration input"));
    }
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] < T::zero() {
                return Err(Error::PreconditionViolated(format!(
                    "negative entry at ({i}, {j})"
                )));
            }
        }
        if !(m[(i, i)] > T::zero()) {
            return Err(Error::PreconditionViolated(format!(
                "diagonal entry {i} is not positive"
            )));
        }
    }
    let pattern: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && m[(i, j)] > T::zero())
                .collect()
        })
        .collect();
    if tarjan_scc(&pattern).len() != 1 {
        return Err(Error::PreconditionViolated("matrix is reducible".into()));
    }
    Ok(())
}
