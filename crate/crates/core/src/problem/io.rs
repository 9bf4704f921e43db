//! JSON problem documents.
//!
//! ```json
//! { "n_nodes": 2,
//!   "edges": [ {"from": 0, "to": 1, "b": -1.0}, {"from": 1, "to": 0, "b": -1.0} ],
//!   "r": [0.0, 0.0], "g": [0.0, 0.0], "T": 1.0 }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Edge, GraphProblem};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: usize,
    pub to: usize,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub n_nodes: usize,
    pub edges: Vec<EdgeDocument>,
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl ProblemDocument {
    pub fn into_problem<T: Scalar>(self) -> Result<GraphProblem<T>> {
        let conv = |v: Vec<f64>| v.into_iter().map(T::c).collect::<Vec<T>>();
        GraphProblem::new(
            self.n_nodes,
            self.edges
                .into_iter()
                .map(|e| Edge::new(e.from, e.to, T::c(e.b))),
            conv(self.r),
            conv(self.g),
            T::c(self.horizon),
        )
    }

    pub fn from_problem<T: Scalar>(p: &GraphProblem<T>) -> Self {
        let conv = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        Self {
            n_nodes: p.n_nodes(),
            edges: p
                .edges()
                .map(|e| EdgeDocument {
                    from: e.from,
                    to: e.to,
                    b: e.b.to_f64_lossy(),
                })
                .collect(),
            r: conv(p.rewards()),
            g: conv(p.terminal_rewards()),
            horizon: p.horizon().to_f64_lossy(),
        }
    }
}

pub fn load_problem<T: Scalar>(text: &str) -> Result<GraphProblem<T>> {
    let doc: ProblemDocument = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    doc.into_problem()
}

/// Canonical form: pretty-printed, edges grouped by source in neighborhood
/// order, floats in shortest round-trip decimal.
pub fn save_problem<T: Scalar>(p: &GraphProblem<T>) -> String {
    let mut s = serde_json::to_string_pretty(&ProblemDocument::from_problem(p))
        .expect("problem document serializes");
    s.push('\n');
    s
}
