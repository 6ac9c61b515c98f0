//! Brute-force observability straight from the definitions.
//!
//! States are split by their output prefixes with Moore-style partition
//! refinement: the block of `x` after step `k+1` is determined by
//! `(g(x), block_k(F(x)))`, which is exactly the length-`k+2` output prefix.
//! A round without any split is a fixpoint; states still sharing a block
//! produce identical outputs forever.

use std::collections::HashMap;

use thiserror::Error;

use crate::gf::Elem;
use crate::system::{Dsff, OutputSequence, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("system is not linear: {0}")]
    NotLinear(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub observable: bool,
    /// Maximum of the per-state indices, when every state is observable.
    pub system_index: Option<usize>,
    /// `K_{x0}` per state index; `None` for unobservable states.
    pub per_state_index: Vec<Option<usize>>,
    pub unobservable_states: Vec<usize>,
    /// Classes of mutually indistinguishable states (size ≥ 2), ordered by first member.
    pub indistinguishable: Vec<Vec<usize>>,
}

fn relabel<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> (Vec<usize>, usize) {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let labels: Vec<usize> = keys
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect();
    (labels, ids.len())
}

pub fn oracle_system(sys: &Dsff) -> OracleVerdict {
    let size = sys.num_states();
    let (first, mut count) = relabel((0..size).map(|s| sys.output(s)));
    let out_label = first.clone();
    let mut labels = first;
    let mut per_state_index = vec![None; size];
    let mut step = 1;
    loop {
        let mut block_size = vec![0usize; count];
        for &l in &labels {
            block_size[l] += 1;
        }
        for s in 0..size {
            if per_state_index[s].is_none() && block_size[labels[s]] == 1 {
                per_state_index[s] = Some(step);
            }
        }
        let (next, next_count) = relabel((0..size).map(|s| (out_label[s], labels[sys.step(s)])));
        if next_count == count {
            break;
        }
        labels = next;
        count = next_count;
        step += 1;
    }

    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); count];
    for s in 0..size {
        classes[labels[s]].push(s);
    }
    let mut indistinguishable: Vec<Vec<usize>> = classes.into_iter().filter(|c| c.len() > 1).collect();
    indistinguishable.sort();
    let unobservable_states: Vec<usize> = (0..size).filter(|&s| per_state_index[s].is_none()).collect();
    let observable = unobservable_states.is_empty();
    OracleVerdict {
        observable,
        system_index: if observable { per_state_index.iter().flatten().copied().max() } else { None },
        per_state_index,
        unobservable_states,
        indistinguishable,
    }
}

/// Smallest prefix length that separates `x0` from every other state, by direct
/// comparison of trajectories.
pub fn oracle_state_index(sys: &Dsff, x0: usize) -> Result<Option<usize>, OracleError> {
    let x0 = sys.check_state(x0)?;
    let mut here = x0;
    let mut rivals: Vec<usize> = (0..sys.num_states()).filter(|&s| s != x0).collect();
    for k in 1..=sys.num_states() {
        let z = sys.output(here);
        rivals.retain(|&r| sys.output(r) == z);
        if rivals.is_empty() {
            return Ok(Some(k));
        }
        here = sys.step(here);
        for r in rivals.iter_mut() {
            *r = sys.step(*r);
        }
    }
    Ok(None)
}

/// All states whose outputs start with `z`, in state-index order.
pub fn oracle_sequence(sys: &Dsff, z: &OutputSequence) -> Vec<usize> {
    sys.indexing()
        .states()
        .filter(|&x0| {
            let mut s = x0;
            z.samples().iter().all(|sample| {
                let ok = sys.output(s) == *sample;
                s = sys.step(s);
                ok
            })
        })
        .collect()
}

/// Checks that `F` and `g` are `F_q`-linear: each is determined by its values on
/// the unit vectors, so `h(x) = Σ x_i · h(e_i)` must hold at every state.
pub fn check_linear(sys: &Dsff) -> Result<(), OracleError> {
    let idx = sys.indexing();
    let f = idx.field();
    let n = idx.n();
    let unit = |i: usize| {
        let mut e = vec![Elem::ZERO; n];
        e[i] = Elem::ONE;
        idx.encode(&e).expect("unit vector is a state")
    };
    let images: Vec<Vec<Elem>> = (0..n).map(|i| idx.decode(sys.step(unit(i)))).collect();
    let outputs: Vec<Vec<Elem>> = (0..n).map(|i| sys.output(unit(i))).collect();
    let combine = |x: &[Elem], cols: &[Vec<Elem>], width: usize| -> Vec<Elem> {
        let mut acc = vec![Elem::ZERO; width];
        for (xi, col) in x.iter().zip(cols) {
            for (a, &c) in acc.iter_mut().zip(col) {
                *a = f.add(*a, f.mul(*xi, c));
            }
        }
        acc
    };
    for s in idx.states() {
        let x = idx.decode(s);
        if idx.decode(sys.step(s)) != combine(&x, &images, n) {
            return Err(OracleError::NotLinear(format!("transition fails superposition at {}", idx.render_state(s))));
        }
        if sys.output(s) != combine(&x, &outputs, sys.m()) {
            return Err(OracleError::NotLinear(format!("output fails superposition at {}", idx.render_state(s))));
        }
    }
    Ok(())
}

/// For a linear system: (some state is observable) ⇔ (every state is observable).
pub fn linear_single_state_check(sys: &Dsff) -> Result<bool, OracleError> {
    check_linear(sys)?;
    let verdict = oracle_system(sys);
    let any = verdict.per_state_index.iter().any(Option::is_some);
    Ok(any == verdict.observable)
}
