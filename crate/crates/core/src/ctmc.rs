//! Finite continuous-time Markov chains and their steady-state solution.
//!
//! The solver is a dense direct one: the balance equations transposed, one
//! of them traded for the normalization constraint, then Gaussian
//! elimination with partial pivoting. State spaces here stay small (a
//! product chain over twelve components tops out at 4096 states), so
//! determinism wins over sparse iteration.

use std::collections::BTreeSet;

use crate::reliability::{AvailabilityValue, FailureRepairPair};
use crate::Error;

/// Largest state count the dense solver accepts.
pub const MAX_DENSE_STATES: usize = 4096;

/// Most components a product chain may have (2^12 = 4096 states).
pub const MAX_PRODUCT_COMPONENTS: usize = 12;

/// A labelled-transition CTMC with a designated set of up states.
#[derive(Debug, Clone)]
pub struct Ctmc {
    n_states: usize,
    transitions: Vec<(usize, usize, f64)>,
    up_states: BTreeSet<usize>,
}

impl Ctmc {
    /// Builds a chain, summing duplicate (from, to) rates.
    pub fn new(
        n_states: usize,
        transitions: Vec<(usize, usize, f64)>,
        up_states: impl IntoIterator<Item = usize>,
    ) -> Result<Self, Error> {
        if n_states == 0 {
            return Err(Error::InvalidParameter(
                "chain needs at least one state".into(),
            ));
        }
        let mut summed: std::collections::BTreeMap<(usize, usize), f64> =
            std::collections::BTreeMap::new();
        for (from, to, rate) in transitions {
            if from >= n_states || to >= n_states {
                return Err(Error::InvalidParameter(format!(
                    "transition {from}->{to} outside 0..{n_states}"
                )));
            }
            if from == to {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on state {from}"
                )));
            }
            if !rate.is_finite() || rate <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "transition {from}->{to} needs a positive finite rate, got {rate}"
                )));
            }
            *summed.entry((from, to)).or_insert(0.0) += rate;
        }
        let up_states: BTreeSet<usize> = up_states.into_iter().collect();
        if let Some(&bad) = up_states.iter().find(|&&s| s >= n_states) {
            return Err(Error::InvalidParameter(format!(
                "up state {bad} outside 0..{n_states}"
            )));
        }
        Ok(Self {
            n_states,
            transitions: summed.into_iter().map(|((f, t), r)| (f, t, r)).collect(),
            up_states,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Transitions with duplicates already merged.
    pub fn transitions(&self) -> &[(usize, usize, f64)] {
        &self.transitions
    }

    pub fn up_states(&self) -> &BTreeSet<usize> {
        &self.up_states
    }

    fn max_rate(&self) -> f64 {
        self.transitions
            .iter()
            .map(|&(_, _, r)| r)
            .fold(0.0, f64::max)
    }
}

/// Steady-state distribution of an irreducible chain.
///
/// Solves pi*Q = 0 with the last balance equation replaced by sum(pi) = 1.
/// A pivot below 1e-12 of the largest rate means the balance equations are
/// rank-deficient, i.e. the chain has absorbing or disconnected states.
pub fn steady_state(chain: &Ctmc) -> Result<Vec<f64>, Error> {
    let n = chain.n_states;
    if n > MAX_DENSE_STATES {
        return Err(Error::DimensionLimit {
            states: n,
            cap: MAX_DENSE_STATES,
        });
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    if chain.transitions.is_empty() {
        return Err(Error::ReducibleChain("chain has no transitions".into()));
    }

    let mut a = vec![0.0_f64; n * n];
    for &(from, to, rate) in &chain.transitions {
        a[to * n + from] += rate;
        a[from * n + from] -= rate;
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    let mut b = vec![0.0_f64; n];
    b[n - 1] = 1.0;

    let pivot_floor = 1e-12 * chain.max_rate();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .total_cmp(&a[s * n + col].abs())
            })
            .unwrap();
        if a[pivot_row * n + col].abs() <= pivot_floor {
            return Err(Error::ReducibleChain(format!(
                "balance equations are rank-deficient at column {col}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for j in col + 1..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut pi = vec![0.0_f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * pi[j];
        }
        pi[row] = acc / a[row * n + row];
    }

    for (i, p) in pi.iter_mut().enumerate() {
        if *p < -1e-14 {
            return Err(Error::ReducibleChain(format!(
                "state {i} solved to probability {p:e}"
            )));
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    Ok(pi)
}

/// Largest absolute entry of pi*Q, the global-balance residual.
pub fn balance_residual(chain: &Ctmc, pi: &[f64]) -> f64 {
    assert_eq!(pi.len(), chain.n_states);
    let mut flow = vec![0.0_f64; chain.n_states];
    for &(from, to, rate) in &chain.transitions {
        let f = pi[from] * rate;
        flow[to] += f;
        flow[from] -= f;
    }
    flow.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Availability of a solved chain: probability mass outside the up set,
/// summed over the down states so tiny complements survive.
pub fn availability(chain: &Ctmc, pi: &[f64]) -> AvailabilityValue {
    assert_eq!(pi.len(), chain.n_states);
    let down: f64 = (0..chain.n_states)
        .filter(|s| !chain.up_states.contains(s))
        .map(|s| pi[s])
        .sum();
    AvailabilityValue::saturating(down)
}

/// Chain over independent on/off components: state bit `j` set means
/// component `j` is up, failures at `1/mttf`, repairs at `1/mttr`, each
/// component transitioning on its own.
///
/// The up set is whatever `up_predicate` accepts; it is handed each state
/// as a per-component boolean vector.
pub fn build_component_product_chain(
    pairs: &[FailureRepairPair],
    up_predicate: impl Fn(&[bool]) -> bool,
) -> Result<Ctmc, Error> {
    let n = pairs.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "product chain needs at least one component".into(),
        ));
    }
    if n > MAX_PRODUCT_COMPONENTS {
        return Err(Error::DimensionLimit {
            states: 1usize << n,
            cap: MAX_DENSE_STATES,
        });
    }
    let n_states = 1usize << n;
    let mut transitions = Vec::with_capacity(n_states * n);
    for state in 0..n_states {
        for (j, pair) in pairs.iter().enumerate() {
            let bit = 1usize << j;
            if state & bit != 0 {
                transitions.push((state, state & !bit, pair.failure_rate()));
            } else {
                transitions.push((state, state | bit, pair.repair_rate()));
            }
        }
    }
    let mut states_buf = vec![false; n];
    let up_states: Vec<usize> = (0..n_states)
        .filter(|&state| {
            for (j, slot) in states_buf.iter_mut().enumerate() {
                *slot = state & (1 << j) != 0;
            }
            up_predicate(&states_buf)
        })
        .collect();
    Ctmc::new(n_states, transitions, up_states)
}
