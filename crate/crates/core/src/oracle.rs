//! Direct RK4 integration of the nonlinear Hamilton–Jacobi system, used to
//! cross-check the closed form. Works on `u` itself and never touches the
//! matrix exponential.

use crate::error::{Error, Result};
use crate::hjb::{uniform_grid, ValueSolution};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    grid: Vec<T>,
    u: Vec<Vec<T>>,
}

impl<T: Scalar> OracleSolution<T> {
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn u_at(&self, k: usize) -> &[T] {
        &self.u[k]
    }

    pub fn initial_values(&self) -> &[T] {
        &self.u[0]
    }
}

/// `du_i/dt = -r(i) - Σ_j e^{-1-b_ij} exp(u_j - u_i)`.
fn hj_rhs<T: Scalar>(p: &GraphProblem<T>, u: &[T], out: &mut [T]) {
    let r = p.rewards();
    for (i, o) in out.iter_mut().enumerate() {
        let flow: T = p
            .neighbors(i)
            .iter()
            .zip(p.offsets(i))
            .map(|(&j, &b)| (u[j] - u[i] - T::one() - b).exp())
            .sum();
        *o = -r[i] - flow;
    }
}

/// Classical RK4 from `u(T) = g` down to `t = 0` with step `T / n_steps`.
pub fn integrate_hj_backward<T: Scalar>(
    p: &GraphProblem<T>,
    n_steps: usize,
) -> Result<OracleSolution<T>> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    let grid = uniform_grid(p.horizon(), n_steps);
    let n = p.n_nodes();
    let mut u = vec![Vec::new(); n_steps + 1];
    u[n_steps] = p.terminal_rewards().to_vec();

    let two = T::c(2.0);
    let six = T::c(6.0);
    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    for k in (0..n_steps).rev() {
        let h = grid[k] - grid[k + 1];
        let y = &u[k + 1];
        hj_rhs(p, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + h / two * k1[i];
        }
        hj_rhs(p, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h / two * k2[i];
        }
        hj_rhs(p, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        hj_rhs(p, &tmp, &mut k4);
        let next: Vec<T> = (0..n)
            .map(|i| y[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
            .collect();
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("RK4 integration"));
        }
        u[k] = next;
    }
    Ok(OracleSolution { grid, u })
}

/// Largest `|u_a - u_b|` over grid points and nodes.
pub fn compare_solutions<T: Scalar>(a: &ValueSolution<T>, b: &OracleSolution<T>) -> Result<T> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let mut worst = T::zero();
    for k in 0..a.grid().len() {
        if a.u_at(k).len() != b.u_at(k).len() {
            return Err(Error::GridMismatch);
        }
        for (&x, &y) in a.u_at(k).iter().zip(b.u_at(k)) {
            let d = (x - y).abs();
            worst = if d.is_nan() { d } else { worst.max(d) };
        }
    }
    Ok(worst)
}
