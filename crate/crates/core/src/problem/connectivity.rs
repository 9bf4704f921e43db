use crate::problem::GraphProblem;
use crate::scalar::Scalar;

/// Strongly connected components of a problem graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub strongly_connected: bool,
    /// Components in reverse topological order of the condensation: every
    /// edge between two components points to one listed earlier.
    pub components: Vec<Vec<usize>>,
}

pub fn strong_connectivity<T: Scalar>(p: &GraphProblem<T>) -> ConnectivityReport {
    let components = tarjan_scc(p.neighborhoods());
    ConnectivityReport {
        strongly_connected: components.len() == 1,
        components,
    }
}

/// Tarjan's algorithm, iterative. Components come out sinks first; nodes
/// inside a component are sorted.
pub fn tarjan_scc(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // (node, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, pos)) = call.last() {
            if pos == 0 && index[v] == usize::MAX {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = graph[v].get(pos) {
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == usize::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}
