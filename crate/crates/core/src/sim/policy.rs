use crate::error::{Error, Result};
use crate::hjb::{optimal_rate, EdgeIntensities, ValueSolution};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;

/// A deterministic feedback policy `(t, i, j) ↦ λ ≥ 0`.
pub trait IntensityPolicy<T: Scalar>: Sync {
    /// Writes the intensities out of `node` at time `t`, aligned with
    /// `neighbors(node)`.
    fn intensities(&self, t: T, node: usize, out: &mut [T]) -> Result<()>;

    /// True when the intensities do not depend on `t`.
    fn is_time_homogeneous(&self) -> bool {
        false
    }
}

/// Closed-form optimal policy backed by a [`ValueSolution`].
#[derive(Debug, Clone, Copy)]
pub struct OptimalPolicy<'a, T> {
    problem: &'a GraphProblem<T>,
    solution: &'a ValueSolution<T>,
}

impl<'a, T: Scalar> OptimalPolicy<'a, T> {
    pub fn new(problem: &'a GraphProblem<T>, solution: &'a ValueSolution<T>) -> Self {
        Self { problem, solution }
    }
}

impl<T: Scalar> IntensityPolicy<T> for OptimalPolicy<'_, T> {
    fn intensities(&self, t: T, node: usize, out: &mut [T]) -> Result<()> {
        let (k, frac) = self.solution.locate(t)?;
        let ui = self.solution.interpolate(k, frac, node);
        for ((o, &j), &b) in out
            .iter_mut()
            .zip(self.problem.neighbors(node))
            .zip(self.problem.offsets(node))
        {
            *o = optimal_rate(b, self.solution.interpolate(k, frac, j) - ui);
        }
        Ok(())
    }
}

/// Time-independent intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantPolicy<T> {
    rates: EdgeIntensities<T>,
}

impl<T: Scalar> ConstantPolicy<T> {
    pub fn new(rates: EdgeIntensities<T>) -> Self {
        Self { rates }
    }

    /// The same intensity on every edge.
    pub fn uniform(p: &GraphProblem<T>, rate: T) -> Result<Self> {
        EdgeIntensities::from_fn(p, |_, _| rate).map(Self::new)
    }

    pub fn rates(&self) -> &EdgeIntensities<T> {
        &self.rates
    }
}

impl<T: Scalar> IntensityPolicy<T> for ConstantPolicy<T> {
    fn intensities(&self, _t: T, node: usize, out: &mut [T]) -> Result<()> {
        out.copy_from_slice(self.rates.node(node));
        Ok(())
    }

    fn is_time_homogeneous(&self) -> bool {
        true
    }
}

/// Intensities tabulated at increasing times, linear in between and held
/// constant outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPolicy<T> {
    times: Vec<T>,
    tables: Vec<EdgeIntensities<T>>,
}

impl<T: Scalar> TabulatedPolicy<T> {
    pub fn new(times: Vec<T>, tables: Vec<EdgeIntensities<T>>) -> Result<Self> {
        if times.is_empty() || times.len() != tables.len() {
            return Err(Error::InvalidArgument(
                "tabulated policy needs one table per time".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "tabulated times must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times, tables })
    }
}

impl<T: Scalar> IntensityPolicy<T> for TabulatedPolicy<T> {
    fn intensities(&self, t: T, node: usize, out: &mut [T]) -> Result<()> {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            out.copy_from_slice(self.tables[0].node(node));
            return Ok(());
        }
        if t >= self.times[last] {
            out.copy_from_slice(self.tables[last].node(node));
            return Ok(());
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let (a, b) = (self.tables[k].node(node), self.tables[k + 1].node(node));
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = x + (y - x) * w;
        }
        Ok(())
    }
}
