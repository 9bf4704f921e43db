//! Constant-policy documents:
//!
//! ```json
//! { "edges": [ { "from": 0, "to": 1, "lambda": 2.0 }, ... ] }
//! ```
//!
//! Every edge of the problem must appear exactly once.

use anyhow::{bail, Context, Result};
use graph_hjb::{Intensities, Problem};
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDocument {
    edges: Vec<PolicyEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyEdge {
    from: usize,
    to: usize,
    lambda: f64,
}

pub fn parse_constant_policy(text: &str, p: &Problem) -> Result<Intensities> {
    let doc: PolicyDocument = serde_json::from_str(text).context("invalid policy document")?;
    let mut rates: Vec<Vec<Option<f64>>> = (0..p.n_nodes())
        .map(|i| vec![None; p.neighbors(i).len()])
        .collect();
    for e in &doc.edges {
        let slot = (e.from < p.n_nodes())
            .then(|| p.neighbors(e.from).iter().position(|&j| j == e.to))
            .flatten();
        let Some(slot) = slot else {
            bail!("policy names {} -> {}, which is not an edge", e.from, e.to);
        };
        if rates[e.from][slot].replace(e.lambda).is_some() {
            bail!("policy lists {} -> {} twice", e.from, e.to);
        }
    }
    let mut full = Vec::with_capacity(rates.len());
    for (i, row) in rates.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (slot, r) in row.into_iter().enumerate() {
            match r {
                Some(x) => out.push(x),
                None => bail!("policy is missing edge {} -> {}", i, p.neighbors(i)[slot]),
            }
        }
        full.push(out);
    }
    Ok(Intensities::new(p, full)?)
}
