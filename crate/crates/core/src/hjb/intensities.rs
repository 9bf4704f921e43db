use crate::error::{Error, Result};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;

/// One nonnegative value per directed edge, laid out like the problem's
/// neighborhoods: `rates[i][slot]` is the intensity of `i -> neighbors(i)[slot]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeIntensities<T> {
    rates: Vec<Vec<T>>,
}

impl<T: Scalar> EdgeIntensities<T> {
    /// Checks shape against `p` and that every entry is finite and nonnegative.
    pub fn new(p: &GraphProblem<T>, rates: Vec<Vec<T>>) -> Result<Self> {
        if rates.len() != p.n_nodes() {
            return Err(Error::LengthMismatch {
                field: "intensities",
                expected: p.n_nodes(),
                found: rates.len(),
            });
        }
        for (i, row) in rates.iter().enumerate() {
            if row.len() != p.neighbors(i).len() {
                return Err(Error::LengthMismatch {
                    field: "intensities",
                    expected: p.neighbors(i).len(),
                    found: row.len(),
                });
            }
            if let Some(slot) = row.iter().position(|&l| !l.is_finite() || l < T::zero()) {
                return Err(Error::NonFiniteValue(format!(
                    "lambda[{i}->{}]",
                    p.neighbors(i)[slot]
                )));
            }
        }
        Ok(Self { rates })
    }

    pub(crate) fn from_rows_unchecked(rates: Vec<Vec<T>>) -> Self {
        Self { rates }
    }

    pub fn from_fn(p: &GraphProblem<T>, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let rates = (0..p.n_nodes())
            .map(|i| p.neighbors(i).iter().map(|&j| f(i, j)).collect())
            .collect();
        Self::new(p, rates)
    }

    pub fn node(&self, i: usize) -> &[T] {
        &self.rates[i]
    }

    pub fn get(&self, i: usize, slot: usize) -> T {
        self.rates[i][slot]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rates
    }

    /// Flattened in canonical edge order.
    pub fn to_flat(&self) -> Vec<T> {
        self.rates.iter().flatten().copied().collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.rates
            .iter()
            .flatten()
            .zip(other.rates.iter().flatten())
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    /// Largest total exit rate over nodes.
    pub fn max_exit_rate(&self) -> T {
        self.rates
            .iter()
            .map(|r| r.iter().copied().sum::<T>())
            .fold(T::zero(), T::max)
    }
}
