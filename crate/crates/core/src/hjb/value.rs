use crate::error::{Error, Result};
use crate::hjb::{build_generator_matrix, edge_weight, optimal_rate, EdgeIntensities};
use crate::numerics::{propagate_tracked, ScaledPositiveVector};
use crate::problem::{tarjan_scc, GraphProblem};
use crate::scalar::Scalar;

/// `t_k = T k / n` for `k = 0..=n`, with both endpoints exact.
pub fn uniform_grid<T: Scalar>(horizon: T, n_steps: usize) -> Vec<T> {
    let n = T::from_usize_lossy(n_steps);
    let mut grid: Vec<T> = (0..=n_steps)
        .map(|k| horizon * T::from_usize_lossy(k) / n)
        .collect();
    grid[0] = T::zero();
    grid[n_steps] = horizon;
    grid
}

/// `max(1000, ceil(100 T (1 + max_i Σ_j e^{-1-b_ij})))`.
pub fn default_steps<T: Scalar>(p: &GraphProblem<T>) -> usize {
    let fastest = (0..p.n_nodes())
        .map(|i| p.offsets(i).iter().map(|&b| edge_weight(b)).sum::<T>())
        .fold(T::zero(), T::max);
    let steps = (T::c(100.0) * p.horizon() * (T::one() + fastest)).ceil();
    steps.to_usize().unwrap_or(usize::MAX).max(1000)
}

/// Value function `u(t_k)` on a uniform grid over `[0, T]`.
///
/// `u_i(t) = log w_i(t)` with `w(t) = e^{B (T - t)} e^{g}`; the solution is
/// stored in log space, and `w` is available per grid point through
/// [`ValueSolution::w_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSolution<T> {
    grid: Vec<T>,
    u: Vec<Vec<T>>,
}

impl<T: Scalar> ValueSolution<T> {
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn horizon(&self) -> T {
        self.grid[self.n_steps()]
    }

    /// `u(t_k)`.
    pub fn u_at(&self, k: usize) -> &[T] {
        &self.u[k]
    }

    pub fn u(&self) -> &[Vec<T>] {
        &self.u
    }

    /// `u(0)`.
    pub fn initial_values(&self) -> &[T] {
        &self.u[0]
    }

    /// `w(t_k)` in scaled form. Fails only when the components span more
    /// than the float range, in which case `u_at` is still exact.
    pub fn w_at(&self, k: usize) -> Result<ScaledPositiveVector<T>> {
        ScaledPositiveVector::from_log_values(&self.u[k])
    }

    /// `u(t)` by linear interpolation between grid points.
    pub fn value_at(&self, t: T) -> Result<Vec<T>> {
        let (k, frac) = self.locate(t)?;
        if frac == T::zero() {
            return Ok(self.u[k].clone());
        }
        Ok(self.u[k]
            .iter()
            .zip(&self.u[k + 1])
            .map(|(&a, &b)| a + (b - a) * frac)
            .collect())
    }

    /// `u_i(t)` for one node, interpolated like [`ValueSolution::value_at`].
    pub fn node_value_at(&self, t: T, i: usize) -> Result<T> {
        let (k, frac) = self.locate(t)?;
        Ok(self.interpolate(k, frac, i))
    }

    pub(crate) fn interpolate(&self, k: usize, frac: T, i: usize) -> T {
        if frac == T::zero() {
            self.u[k][i]
        } else {
            self.u[k][i] + (self.u[k + 1][i] - self.u[k][i]) * frac
        }
    }

    /// Grid cell containing `t` and the fractional position inside it.
    pub(crate) fn locate(&self, t: T) -> Result<(usize, T)> {
        let horizon = self.horizon();
        if !(t >= T::zero() && t <= horizon) {
            return Err(Error::OutOfRange(t.to_f64_lossy()));
        }
        let n = self.n_steps();
        if t == horizon {
            return Ok((n, T::zero()));
        }
        let mut k = (t / horizon * T::from_usize_lossy(n))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(n - 1);
        // Guard against rounding in the division above.
        while k > 0 && self.grid[k] > t {
            k -= 1;
        }
        while k + 1 < n && self.grid[k + 1] <= t {
            k += 1;
        }
        let frac = (t - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        Ok((k, frac))
    }
}

/// Closed-form value function on `n_steps` uniform steps.
///
/// `w` is propagated backward from `e^g` by repeated application of
/// `expm(B Δ)`. Each strongly connected block of `B` carries its own log
/// scale, so reward gaps that separate blocks by more than the float range
/// neither overflow nor underflow. `u(T) = g` exactly.
pub fn solve_value_function<T: Scalar>(
    p: &GraphProblem<T>,
    n_steps: usize,
) -> Result<ValueSolution<T>> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    let b = build_generator_matrix(p).into_matrix();
    let n = p.n_nodes();
    let pattern: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && b[(i, j)] > T::zero())
                .collect()
        })
        .collect();
    let blocks = tarjan_scc(&pattern);
    let mut logs = propagate_tracked(&b, p.terminal_rewards(), p.horizon(), n_steps, &blocks)?;
    if logs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("value function"));
    }
    // Propagation runs in time-to-go; flip to calendar time.
    logs.reverse();
    logs[n_steps] = p.terminal_rewards().to_vec();
    Ok(ValueSolution {
        grid: uniform_grid(p.horizon(), n_steps),
        u: logs,
    })
}

fn policy_from_values<T: Scalar>(p: &GraphProblem<T>, u: &[T]) -> EdgeIntensities<T> {
    let rows = (0..p.n_nodes())
        .map(|i| {
            p.neighbors(i)
                .iter()
                .zip(p.offsets(i))
                .map(|(&j, &b)| optimal_rate(b, u[j] - u[i]))
                .collect()
        })
        .collect();
    EdgeIntensities::from_rows_unchecked(rows)
}

/// Optimal feedback intensities `e^{-1-b_ij} w_j(t) / w_i(t)`.
///
/// Exact at grid points; in between, `u` is interpolated linearly before
/// exponentiating.
pub fn optimal_policy_at<T: Scalar>(
    sol: &ValueSolution<T>,
    p: &GraphProblem<T>,
    t: T,
) -> Result<EdgeIntensities<T>> {
    let u = sol.value_at(t)?;
    let pol = policy_from_values(p, &u);
    if pol.rows().iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("optimal intensities"));
    }
    Ok(pol)
}

/// Largest residual of the nonlinear HJ system over interior grid points,
/// with `du/dt` by central differences:
/// `max |du_i/dt + r(i) + Σ_j e^{-1-b_ij} e^{u_j - u_i}|`.
pub fn hj_residual<T: Scalar>(sol: &ValueSolution<T>, p: &GraphProblem<T>) -> T {
    let grid = sol.grid();
    let mut worst = T::zero();
    for k in 1..sol.n_steps() {
        let dt = grid[k + 1] - grid[k - 1];
        let (prev, cur, next) = (sol.u_at(k - 1), sol.u_at(k), sol.u_at(k + 1));
        for i in 0..p.n_nodes() {
            let du = (next[i] - prev[i]) / dt;
            let flow: T = p
                .neighbors(i)
                .iter()
                .zip(p.offsets(i))
                .map(|(&j, &b)| optimal_rate(b, cur[j] - cur[i]))
                .sum();
            let r = (du + p.rewards()[i] + flow).abs();
            worst = if r.is_nan() { r } else { worst.max(r) };
        }
    }
    worst
}

/// A priori bound on [`hj_residual`] for an exact solution sampled on the
/// grid of `sol`.
///
/// With `Λ` the largest total exit rate and `R = max |r|` over the grid,
/// `|u'''| ≤ K = Λ (2R + 2Λ) (2R + 4Λ)`, and central differences err by at
/// most `h² K / 6`. The bound doubles that (rates are only sampled at grid
/// points) and adds the rounding level of the difference quotient.
pub fn hj_residual_bound<T: Scalar>(sol: &ValueSolution<T>, p: &GraphProblem<T>) -> T {
    let n = sol.n_steps();
    let h = sol.horizon() / T::from_usize_lossy(n);
    let r_max = p.rewards().iter().fold(T::zero(), |m, r| m.max(r.abs()));
    let mut lam = T::zero();
    let mut u_max = T::zero();
    for u in sol.u() {
        for i in 0..p.n_nodes() {
            u_max = u_max.max(u[i].abs());
            let exit: T = p
                .neighbors(i)
                .iter()
                .zip(p.offsets(i))
                .map(|(&j, &b)| optimal_rate(b, u[j] - u[i]))
                .sum();
            lam = lam.max(exit);
        }
    }
    let two = T::c(2.0);
    let k = lam * (two * r_max + two * lam) * (two * r_max + T::c(4.0) * lam);
    let truncation = h * h * k / T::c(3.0);
    let rounding = T::c(8.0) * T::epsilon() * (u_max / h + r_max + lam);
    truncation + rounding
}
