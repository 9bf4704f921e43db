//! Deterministic value of a fixed policy: backward RK4 on the linear
//! policy-evaluation system `dV_i/dt = L(i, λ_i) - Σ_j λ_ij (V_j - V_i)`,
//! `V(T) = g`.

use crate::error::{Error, Result};
use crate::hjb::{running_cost, uniform_grid, ValueSolution};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;
use crate::sim::{ConstantPolicy, IntensityPolicy, OptimalPolicy};

/// Rates frozen over one backward step.
struct Frozen<T> {
    rates: Vec<Vec<T>>,
    cost: Vec<T>,
}

impl<T: Scalar> Frozen<T> {
    fn at<P: IntensityPolicy<T> + ?Sized>(p: &GraphProblem<T>, pol: &P, t: T) -> Result<Self> {
        let mut rates = Vec::with_capacity(p.n_nodes());
        let mut cost = Vec::with_capacity(p.n_nodes());
        for i in 0..p.n_nodes() {
            let mut lam = vec![T::zero(); p.neighbors(i).len()];
            pol.intensities(t, i, &mut lam)?;
            if lam.iter().any(|&l| !l.is_finite() || l < T::zero()) {
                return Err(Error::NonFiniteIntensity {
                    node: i,
                    t: t.to_f64_lossy(),
                });
            }
            cost.push(running_cost(p, i, &lam));
            rates.push(lam);
        }
        Ok(Self { rates, cost })
    }

    fn rhs(&self, p: &GraphProblem<T>, v: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let flow: T = self.rates[i]
                .iter()
                .zip(p.neighbors(i))
                .map(|(&l, &j)| l * (v[j] - v[i]))
                .sum();
            *o = self.cost[i] - flow;
        }
    }

    fn max_exit_rate(&self) -> T {
        self.rates
            .iter()
            .map(|r| r.iter().copied().sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// RK4 from `v` at the later time back by `span` in `substeps` steps.
    fn integrate_back(&self, p: &GraphProblem<T>, v: &mut [T], span: T, substeps: usize) {
        let n = v.len();
        let h = -span / T::from_usize_lossy(substeps);
        let (two, six) = (T::c(2.0), T::c(6.0));
        let mut k1 = vec![T::zero(); n];
        let mut k2 = vec![T::zero(); n];
        let mut k3 = vec![T::zero(); n];
        let mut k4 = vec![T::zero(); n];
        let mut tmp = vec![T::zero(); n];
        for _ in 0..substeps {
            self.rhs(p, v, &mut k1);
            for i in 0..n {
                tmp[i] = v[i] + h / two * k1[i];
            }
            self.rhs(p, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = v[i] + h / two * k2[i];
            }
            self.rhs(p, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = v[i] + h * k3[i];
            }
            self.rhs(p, &tmp, &mut k4);
            for i in 0..n {
                v[i] = v[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
            }
        }
    }
}

/// Expected objective from every start node under a constant policy.
pub fn evaluate_fixed_policy<T: Scalar>(
    p: &GraphProblem<T>,
    pol: &ConstantPolicy<T>,
) -> Result<Vec<T>> {
    let frozen = Frozen::at(p, pol, T::zero())?;
    let fastest = frozen.max_exit_rate();
    let steps = (T::c(100.0) * p.horizon() * (T::one() + fastest))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1000);
    let mut v = p.terminal_rewards().to_vec();
    frozen.integrate_back(p, &mut v, p.horizon(), steps);
    finite(v)
}

/// Expected objective of the time-discretized policy the simulator runs:
/// `pol` frozen at the left end of each of `n_time_steps` uniform steps.
/// Each step is integrated with `substeps` RK4 steps.
pub fn evaluate_policy<T: Scalar, P: IntensityPolicy<T> + ?Sized>(
    p: &GraphProblem<T>,
    pol: &P,
    n_time_steps: usize,
    substeps: usize,
) -> Result<Vec<T>> {
    if n_time_steps == 0 || substeps == 0 {
        return Err(Error::InvalidArgument(
            "step counts must be positive".into(),
        ));
    }
    let grid = uniform_grid(p.horizon(), n_time_steps);
    let mut v = p.terminal_rewards().to_vec();
    for k in (0..n_time_steps).rev() {
        let frozen = Frozen::at(p, pol, grid[k])?;
        frozen.integrate_back(p, &mut v, grid[k + 1] - grid[k], substeps);
    }
    finite(v)
}

/// Exact value of the simulator's frozen optimal policy minus `u(0)`, per
/// start node. Nonpositive up to integration error.
pub fn frozen_policy_bias<T: Scalar>(
    p: &GraphProblem<T>,
    sol: &ValueSolution<T>,
    n_time_steps: usize,
    substeps: usize,
) -> Result<Vec<T>> {
    let v = evaluate_policy(p, &OptimalPolicy::new(p, sol), n_time_steps, substeps)?;
    Ok(v.iter()
        .zip(sol.initial_values())
        .map(|(&a, &b)| a - b)
        .collect())
}

fn finite<T: Scalar>(v: Vec<T>) -> Result<Vec<T>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite("policy evaluation"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hjb::solve_value_function;
    use crate::problem::Edge;

    fn two_cycle() -> GraphProblem<f64> {
        GraphProblem::new(
            2,
            [Edge::new(0, 1, -1.0), Edge::new(1, 0, -1.0)],
            vec![0.0; 2],
            vec![0.0; 2],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn optimal_constant_policy_recovers_value() {
        let p = two_cycle();
        let v = evaluate_fixed_policy(&p, &ConstantPolicy::uniform(&p, 1.0).unwrap()).unwrap();
        let sol = solve_value_function(&p, 100).unwrap();
        for (a, b) in v.iter().zip(sol.initial_values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_policy_without_edges() {
        let p = GraphProblem::<f64>::new(2, [], vec![0.5, -2.0], vec![1.0, 3.0], 2.0).unwrap();
        let v = evaluate_fixed_policy(&p, &ConstantPolicy::uniform(&p, 0.0).unwrap()).unwrap();
        assert!((v[0] - (0.5 * 2.0 + 1.0)).abs() < 1e-12);
        assert!((v[1] - (-2.0 * 2.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn suboptimal_constant_is_dominated() {
        let p = two_cycle();
        let sol = solve_value_function(&p, 100).unwrap();
        for rate in [0.0, 0.5, 2.0, 5.0] {
            let v = evaluate_fixed_policy(&p, &ConstantPolicy::uniform(&p, rate).unwrap()).unwrap();
            // Symmetric: V = T(-(λ log λ - λ)) = T(λ - λ log λ) ≤ T.
            let expected = rate - if rate > 0.0 { rate * rate.ln() } else { 0.0 };
            for (a, b) in v.iter().zip(sol.initial_values()) {
                assert!((a - expected).abs() < 1e-9);
                assert!(*a <= b + 1e-9);
            }
        }
    }

    #[test]
    fn frozen_bias_shrinks() {
        let p = GraphProblem::new(
            3,
            [
                Edge::new(0, 1, -0.5f64),
                Edge::new(1, 2, 0.2),
                Edge::new(2, 0, -1.0),
                Edge::new(0, 2, 0.0),
            ],
            vec![0.3, -0.6, 0.2],
            vec![1.5, -1.0, 0.0],
            1.0,
        )
        .unwrap();
        let sol = solve_value_function(&p, 4000).unwrap();
        let coarse = frozen_policy_bias(&p, &sol, 20, 8).unwrap();
        let fine = frozen_policy_bias(&p, &sol, 40, 8).unwrap();
        for i in 0..3 {
            assert!(coarse[i] <= 1e-9);
            assert!(fine[i].abs() < coarse[i].abs());
        }
    }
}
