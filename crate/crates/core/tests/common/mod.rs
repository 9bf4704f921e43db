#![allow(dead_code)]

use graph_hjb::{Edge, Problem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Ranges {
    pub n: (usize, usize),
    pub density: f64,
    pub b: f64,
    pub r: f64,
    pub g: f64,
}

impl Default for Ranges {
    fn default() -> Self {
        Self {
            n: (2, 10),
            density: 0.3,
            b: 3.0,
            r: 2.0,
            g: 2.0,
        }
    }
}

/// Random digraph with at least `density · N(N-1)` edges. With `connected`,
/// a random Hamiltonian cycle is laid down first.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    ranges: &Ranges,
    horizon: f64,
    connected: bool,
) -> Problem {
    let n = rng.random_range(ranges.n.0..=ranges.n.1);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    pairs.shuffle(rng);
    let mut chosen = Vec::new();
    if connected {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for k in 0..n {
            chosen.push((perm[k], perm[(k + 1) % n]));
        }
        if n == 2 {
            chosen.truncate(2);
        }
    }
    let min_edges = (ranges.density * (n * (n - 1)) as f64).ceil() as usize;
    let extra_p: f64 = rng.random_range(0.0..0.5);
    for &(i, j) in &pairs {
        if chosen.contains(&(i, j)) {
            continue;
        }
        if chosen.len() < min_edges || rng.random_bool(extra_p) {
            chosen.push((i, j));
        }
    }
    chosen.dedup();
    let mut edges: Vec<Edge<f64>> = chosen
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, rng.random_range(-ranges.b..=ranges.b)))
        .collect();
    edges.sort_by_key(|e| (e.from, e.to));
    edges.dedup_by_key(|e| (e.from, e.to));
    let r = (0..n)
        .map(|_| rng.random_range(-ranges.r..=ranges.r))
        .collect();
    let g = (0..n)
        .map(|_| rng.random_range(-ranges.g..=ranges.g))
        .collect();
    Problem::new(n, edges, r, g, horizon).expect("generated instance is valid")
}

pub fn to_nalgebra(m: &graph_hjb::Matrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(m.n(), m.n(), |i, j| m[(i, j)])
}

/// All eigenvalues from a dense Schur decomposition.
pub fn dense_eigenvalues(m: &graph_hjb::Matrix) -> Vec<nalgebra::Complex<f64>> {
    to_nalgebra(m)
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Largest real part among eigenvalues.
pub fn dominant_real(m: &graph_hjb::Matrix) -> f64 {
    dense_eigenvalues(m)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}
