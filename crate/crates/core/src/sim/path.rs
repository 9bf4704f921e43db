use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hjb::{running_cost, uniform_grid};
use crate::problem::GraphProblem;
use crate::scalar::Scalar;
use crate::sim::IntensityPolicy;

/// One simulated trajectory on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord<T> {
    pub jump_times: Vec<T>,
    /// Visited nodes; `states[0]` is the start node and `states[k + 1]` is
    /// entered at `jump_times[k]`.
    pub states: Vec<usize>,
    /// `∫ L dt` along the path.
    pub running_cost: T,
    pub terminal_reward: T,
    /// `terminal_reward - running_cost`.
    pub objective: T,
}

/// `min(10⁶, ceil(10⁴ T))`, at least 1.
pub fn default_time_steps<T: Scalar>(horizon: T) -> usize {
    (T::c(1e4) * horizon)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .clamp(1, 1_000_000)
}

struct Trace<'a, T> {
    jump_times: &'a mut Vec<T>,
    states: &'a mut Vec<usize>,
}

/// Simulates one path started at `i0` at time 0.
///
/// The policy is frozen at the left end of each of `n_time_steps` uniform
/// steps; within a step the chain is sampled exactly with competing
/// exponential clocks and the running cost is integrated in closed form.
/// Time-homogeneous policies are sampled in a single step.
pub fn sample_path<T: Scalar, P: IntensityPolicy<T> + ?Sized>(
    p: &GraphProblem<T>,
    pol: &P,
    i0: usize,
    seed: u64,
    n_time_steps: usize,
) -> Result<PathRecord<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jump_times = Vec::new();
    let mut states = vec![i0];
    let (running_cost, last) = run_path(
        p,
        pol,
        i0,
        n_time_steps,
        &mut rng,
        Some(Trace {
            jump_times: &mut jump_times,
            states: &mut states,
        }),
    )?;
    let terminal_reward = p.terminal_rewards()[last];
    Ok(PathRecord {
        jump_times,
        states,
        running_cost,
        terminal_reward,
        objective: terminal_reward - running_cost,
    })
}

/// Objective of one path without recording it.
pub(crate) fn path_objective<T: Scalar, P: IntensityPolicy<T> + ?Sized>(
    p: &GraphProblem<T>,
    pol: &P,
    i0: usize,
    seed: u64,
    n_time_steps: usize,
) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cost, last) = run_path(p, pol, i0, n_time_steps, &mut rng, None)?;
    Ok(p.terminal_rewards()[last] - cost)
}

fn run_path<T: Scalar, P: IntensityPolicy<T> + ?Sized, R: Rng>(
    p: &GraphProblem<T>,
    pol: &P,
    i0: usize,
    n_time_steps: usize,
    rng: &mut R,
    mut trace: Option<Trace<'_, T>>,
) -> Result<(T, usize)> {
    let n = p.n_nodes();
    if i0 >= n {
        return Err(Error::IndexOutOfRange {
            what: "start node",
            index: i0,
            n,
        });
    }
    if n_time_steps == 0 {
        return Err(Error::InvalidArgument(
            "n_time_steps must be positive".into(),
        ));
    }
    let horizon = p.horizon();
    let steps = if pol.is_time_homogeneous() {
        1
    } else {
        n_time_steps
    };
    let grid = uniform_grid(horizon, steps);
    let max_deg = (0..n).map(|i| p.neighbors(i).len()).max().unwrap_or(0);
    let mut rates = vec![T::zero(); max_deg];

    let mut state = i0;
    let mut cost = T::zero();
    let mut now = T::zero();
    'steps: for k in 0..steps {
        let (frozen_at, end) = (grid[k], grid[k + 1]);
        loop {
            let deg = p.neighbors(state).len();
            if deg == 0 {
                // A sink is never left: L = -r for the rest of the horizon.
                cost = cost - p.rewards()[state] * (horizon - now);
                break 'steps;
            }
            let lam = &mut rates[..deg];
            pol.intensities(frozen_at, state, lam)?;
            if lam.iter().any(|&l| !l.is_finite() || l < T::zero()) {
                return Err(Error::NonFiniteIntensity {
                    node: state,
                    t: frozen_at.to_f64_lossy(),
                });
            }
            let total: T = lam.iter().copied().sum();
            let l_rate = running_cost(p, state, lam);
            let wait = if total > T::zero() {
                let u: f64 = rng.random();
                -T::c(1.0 - u).ln() / total
            } else {
                T::infinity()
            };
            if now + wait >= end {
                cost = cost + l_rate * (end - now);
                now = end;
                break;
            }
            cost = cost + l_rate * wait;
            now = now + wait;
            let pick = T::c(rng.random::<f64>()) * total;
            let mut acc = T::zero();
            let mut slot = deg - 1;
            for (s, &l) in lam.iter().enumerate() {
                acc = acc + l;
                if pick < acc {
                    slot = s;
                    break;
                }
            }
            // Rounding can leave `pick` past the last positive rate.
            while lam[slot] == T::zero() {
                slot -= 1;
            }
            state = p.neighbors(state)[slot];
            if let Some(tr) = trace.as_mut() {
                tr.jump_times.push(now);
                tr.states.push(state);
            }
        }
    }
    Ok((cost, state))
}
