use crate::error::{Error, Result};
use crate::numerics::{expm, DenseMatrix};
use crate::scalar::Scalar;

/// A positive vector stored as `exp(log_scale) * direction` with
/// `max(direction) == 1`, so that magnitudes far outside the float range
/// stay representable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPositiveVector<T> {
    direction: Vec<T>,
    log_scale: T,
}

impl<T: Scalar> ScaledPositiveVector<T> {
    /// Normalizes `direction` to unit max-norm, folding the factor into the
    /// scale. Components must be positive and within the normal float range
    /// of the largest one.
    pub fn new(direction: Vec<T>, log_scale: T) -> Result<Self> {
        if !log_scale.is_finite() {
            return Err(Error::NonFinite("log scale"));
        }
        let mut v = Self {
            direction,
            log_scale,
        };
        v.renormalize(0)?;
        Ok(v)
    }

    /// Represents `exp(logs[i])` componentwise.
    pub fn from_log_values(logs: &[T]) -> Result<Self> {
        let m = logs.iter().copied().fold(T::neg_infinity(), T::max);
        if !m.is_finite() || logs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("log values"));
        }
        Self::new(logs.iter().map(|&x| (x - m).exp()).collect(), m)
    }

    pub fn direction(&self) -> &[T] {
        &self.direction
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    pub fn len(&self) -> usize {
        self.direction.len()
    }

    pub fn is_empty(&self) -> bool {
        self.direction.is_empty()
    }

    /// `log` of each represented component.
    pub fn log_values(&self) -> Vec<T> {
        self.direction
            .iter()
            .map(|&d| self.log_scale + d.ln())
            .collect()
    }

    /// Represented components in ordinary float space; may overflow.
    pub fn values(&self) -> Vec<T> {
        let s = self.log_scale.exp();
        self.direction.iter().map(|&d| d * s).collect()
    }

    fn renormalize(&mut self, step: usize) -> Result<()> {
        if let Some(component) = self.direction.iter().position(|&d| !(d > T::zero())) {
            return Err(if self.direction[component].is_nan() {
                Error::NonFinite("propagated direction")
            } else {
                Error::PositivityLost { step, component }
            });
        }
        let m = self.direction.iter().copied().fold(T::zero(), T::max);
        if !m.is_finite() {
            return Err(Error::NonFinite("propagated direction"));
        }
        for d in &mut self.direction {
            *d = *d / m;
        }
        if let Some(component) = self
            .direction
            .iter()
            .position(|&d| d < T::min_positive_value())
        {
            return Err(Error::Underflow { step, component });
        }
        self.log_scale = self.log_scale + m.ln();
        Ok(())
    }
}

fn uniform_step<T: Scalar>(duration: T, n_steps: usize) -> Result<T> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    if !(duration >= T::zero()) || !duration.is_finite() {
        return Err(Error::InvalidArgument(
            "duration must be finite and nonnegative".into(),
        ));
    }
    Ok(duration / T::from_usize_lossy(n_steps))
}

/// `e^{M τ_k} v0` for `τ_k = k * duration / n_steps`, `k = 0..=n_steps`.
///
/// One step matrix `E = expm(M Δ)` is applied repeatedly and each iterate is
/// renormalized. Fails with `PositivityLost` if an iterate leaves the
/// positive orthant, which cannot happen when `M + σI ≥ 0` for some `σ`, and
/// with `Underflow` once two components drift apart by more than the float
/// range; [`propagate_tracked`] handles the latter case.
pub fn propagate<T: Scalar>(
    m: &DenseMatrix<T>,
    v0: &ScaledPositiveVector<T>,
    duration: T,
    n_steps: usize,
) -> Result<Vec<ScaledPositiveVector<T>>> {
    assert_eq!(m.n(), v0.len(), "dimension mismatch");
    let dt = uniform_step(duration, n_steps)?;
    let step = expm(&m.scaled(dt))?;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(v0.clone());
    for k in 1..=n_steps {
        let prev = &out[k - 1];
        let mut next = ScaledPositiveVector {
            direction: step.mul_vec(&prev.direction),
            log_scale: prev.log_scale,
        };
        next.renormalize(k)?;
        out.push(next);
    }
    Ok(out)
}

/// Log-space variant of [`propagate`] with one scale per block of nodes.
///
/// `blocks` partitions the indices (typically the strongly connected
/// components of the off-diagonal pattern of `M`). Each block is propagated
/// with its own scale, so two blocks whose magnitudes drift apart by more
/// than the float range remain accurate. Coupling from nodes downstream of a
/// block enters through the exact rows of `E = expm(M Δ)`, restricted to
/// nodes reachable from the block. Returns `log` of the represented vector at
/// every grid point.
pub fn propagate_tracked<T: Scalar>(
    m: &DenseMatrix<T>,
    log_v0: &[T],
    duration: T,
    n_steps: usize,
    blocks: &[Vec<usize>],
) -> Result<Vec<Vec<T>>> {
    let n = m.n();
    assert_eq!(log_v0.len(), n, "dimension mismatch");
    let mut covered = vec![false; n];
    for &i in blocks.iter().flatten() {
        if i >= n || covered[i] {
            return Err(Error::InvalidArgument(
                "blocks must partition the indices".into(),
            ));
        }
        covered[i] = true;
    }
    if covered.iter().any(|c| !c) {
        return Err(Error::InvalidArgument(
            "blocks must partition the indices".into(),
        ));
    }
    let dt = uniform_step(duration, n_steps)?;
    let step = expm(&m.scaled(dt))?;

    let reach = reachability(m);
    let plan: Vec<BlockPlan> = blocks
        .iter()
        .map(|block| {
            let mut outside: Vec<usize> = (0..n)
                .filter(|&j| !block.contains(&j) && block.iter().any(|&i| reach[i][j]))
                .collect();
            outside.sort_unstable();
            BlockPlan {
                nodes: block.clone(),
                outside,
            }
        })
        .collect();

    let mut states = plan
        .iter()
        .map(|b| {
            let logs: Vec<T> = b.nodes.iter().map(|&i| log_v0[i]).collect();
            ScaledPositiveVector::from_log_values(&logs)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(log_v0.to_vec());
    for k in 1..=n_steps {
        let prev_log = &out[k - 1];
        let mut next_log = vec![T::zero(); n];
        for (b, state) in plan.iter().zip(states.iter_mut()) {
            let s = state.log_scale;
            let mut y: Vec<T> = b
                .nodes
                .iter()
                .map(|&i| {
                    let inner: T = b
                        .nodes
                        .iter()
                        .zip(&state.direction)
                        .map(|(&j, &d)| step[(i, j)] * d)
                        .sum();
                    let coupled: T = b
                        .outside
                        .iter()
                        .map(|&j| step[(i, j)] * (prev_log[j] - s).exp())
                        .sum();
                    inner + coupled
                })
                .collect();
            std::mem::swap(&mut state.direction, &mut y);
            state.renormalize(k).map_err(|e| match e {
                Error::PositivityLost { step, component } => Error::PositivityLost {
                    step,
                    component: b.nodes[component],
                },
                Error::Underflow { step, component } => Error::Underflow {
                    step,
                    component: b.nodes[component],
                },
                e => e,
            })?;
            for (&i, l) in b.nodes.iter().zip(state.log_values()) {
                next_log[i] = l;
            }
        }
        out.push(next_log);
    }
    Ok(out)
}

struct BlockPlan {
    nodes: Vec<usize>,
    outside: Vec<usize>,
}

/// `reach[i][j]`: a path of nonzero off-diagonal entries leads from `i` to `j`.
fn reachability<T: Scalar>(m: &DenseMatrix<T>) -> Vec<Vec<bool>> {
    let n = m.n();
    let mut reach = vec![vec![false; n]; n];
    for (src, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![src];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if w != v && m[(v, w)] != T::zero() && !row[w] {
                    row[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    reach
}
