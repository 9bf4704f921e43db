//! Problem instances: graph, edge offsets, rewards, horizon.

mod connectivity;
mod io;

pub use connectivity::{strong_connectivity, tarjan_scc, ConnectivityReport};
pub use io::{load_problem, save_problem, ProblemDocument};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A directed edge `from -> to` with offset `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub from: usize,
    pub to: usize,
    pub b: T,
}

impl<T> Edge<T> {
    pub fn new(from: usize, to: usize, b: T) -> Self {
        Self { from, to, b }
    }
}

/// A validated control problem on a finite directed graph.
///
/// Neighborhoods keep the order in which edges were supplied. Per-edge data
/// elsewhere in the crate (offsets, intensities) is laid out in that same
/// order, indexed by `(node, slot)` where `slot` is the position of the
/// neighbor in `neighbors(node)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphProblem<T> {
    neighbors: Vec<Vec<usize>>,
    offsets: Vec<Vec<T>>,
    rewards: Vec<T>,
    terminal_rewards: Vec<T>,
    horizon: T,
}

impl<T: Scalar> GraphProblem<T> {
    /// Builds and validates an instance.
    pub fn new(
        n_nodes: usize,
        edges: impl IntoIterator<Item = Edge<T>>,
        rewards: Vec<T>,
        terminal_rewards: Vec<T>,
        horizon: T,
    ) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::TooFewNodes(n_nodes));
        }
        let mut neighbors = vec![Vec::new(); n_nodes];
        let mut offsets = vec![Vec::new(); n_nodes];
        for Edge { from, to, b } in edges {
            if from >= n_nodes {
                return Err(Error::IndexOutOfRange {
                    what: "edge source",
                    index: from,
                    n: n_nodes,
                });
            }
            if to >= n_nodes {
                return Err(Error::IndexOutOfRange {
                    what: "edge target",
                    index: to,
                    n: n_nodes,
                });
            }
            if from == to {
                return Err(Error::SelfLoop(from));
            }
            if neighbors[from].contains(&to) {
                return Err(Error::DuplicateEdge { from, to });
            }
            if !b.is_finite() {
                return Err(Error::NonFiniteValue(format!("b[{from}->{to}]")));
            }
            neighbors[from].push(to);
            offsets[from].push(b);
        }
        let p = Self {
            neighbors,
            offsets,
            rewards,
            terminal_rewards,
            horizon,
        };
        p.check_node_data()?;
        Ok(p)
    }

    fn check_node_data(&self) -> Result<()> {
        let n = self.n_nodes();
        for (field, v) in [("r", &self.rewards), ("g", &self.terminal_rewards)] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    field,
                    expected: n,
                    found: v.len(),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteValue(format!("{field}[{i}]")));
            }
        }
        if !self.horizon.is_finite() {
            return Err(Error::NonFiniteValue("T".into()));
        }
        if self.horizon <= T::zero() {
            return Err(Error::NonPositiveHorizon);
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.neighbors.len()
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn neighborhoods(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    /// Offsets `b_ij` aligned with `neighbors(i)`.
    pub fn offsets(&self, i: usize) -> &[T] {
        &self.offsets[i]
    }

    /// Offset of the edge `i -> j`, if present.
    pub fn offset(&self, i: usize, j: usize) -> Option<T> {
        self.neighbors[i]
            .iter()
            .position(|&k| k == j)
            .map(|slot| self.offsets[i][slot])
    }

    pub fn rewards(&self) -> &[T] {
        &self.rewards
    }

    pub fn terminal_rewards(&self) -> &[T] {
        &self.terminal_rewards
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    /// All edges in canonical order: by source, then neighborhood order.
    pub fn edges(&self) -> impl Iterator<Item = Edge<T>> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(move |(i, nbrs)| {
                nbrs.iter()
                    .zip(&self.offsets[i])
                    .map(move |(&j, &b)| Edge::new(i, j, b))
            })
    }

    pub fn with_rewards(&self, rewards: Vec<T>) -> Result<Self> {
        let p = Self {
            rewards,
            ..self.clone()
        };
        p.check_node_data()?;
        Ok(p)
    }

    pub fn with_terminal_rewards(&self, terminal_rewards: Vec<T>) -> Result<Self> {
        let p = Self {
            terminal_rewards,
            ..self.clone()
        };
        p.check_node_data()?;
        Ok(p)
    }

    pub fn with_horizon(&self, horizon: T) -> Result<Self> {
        let p = Self {
            horizon,
            ..self.clone()
        };
        p.check_node_data()?;
        Ok(p)
    }

    /// Converts the scalar type of every numeric field.
    pub fn cast<U: Scalar>(&self) -> GraphProblem<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::c(x.to_f64_lossy())).collect::<Vec<U>>();
        GraphProblem {
            neighbors: self.neighbors.clone(),
            offsets: self.offsets.iter().map(|o| conv(o)).collect(),
            rewards: conv(&self.rewards),
            terminal_rewards: conv(&self.terminal_rewards),
            horizon: U::c(self.horizon.to_f64_lossy()),
        }
    }
}
