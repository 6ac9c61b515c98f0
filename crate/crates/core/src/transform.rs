//! State-space bijections and conjugate systems.
//!
//! For `x̃ = h(x)` the conjugate system is `F̃ = h∘F∘h⁻¹`, `g̃ = g∘h⁻¹`.
//! Its canonical realization coincides with the original one: every basis
//! function transforms as `ψ̃_k = ψ_k∘h⁻¹`, and linear dependencies among
//! value tables are unchanged by permuting the states.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::funcspace::{FuncError, FuncTable, StateMap};
use crate::lor::build_lor;
use crate::system::{Dsff, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("state map is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("bijection acts on {found} states, the system has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("systems are not conjugate under the bijection (first failure at state {0})")]
    NotConjugate(usize),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Func(#[from] FuncError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBijection {
    h: Vec<usize>,
    h_inv: Vec<usize>,
}

impl StateBijection {
    pub fn new(h: Vec<usize>) -> Result<StateBijection, TransformError> {
        let size = h.len();
        let mut h_inv = vec![usize::MAX; size];
        for (x, &y) in h.iter().enumerate() {
            if y >= size || h_inv[y] != usize::MAX {
                return Err(TransformError::NotAPermutation(size));
            }
            h_inv[y] = x;
        }
        Ok(StateBijection { h, h_inv })
    }

    pub fn identity(size: usize) -> StateBijection {
        StateBijection { h: (0..size).collect(), h_inv: (0..size).collect() }
    }

    /// Uniform random permutation from a seeded Fisher–Yates shuffle.
    pub fn random(size: usize, seed: u64) -> StateBijection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h: Vec<usize> = (0..size).collect();
        h.shuffle(&mut rng);
        StateBijection::new(h).expect("a shuffle is a permutation")
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.h[x]
    }

    #[inline]
    pub fn apply_inv(&self, y: usize) -> usize {
        self.h_inv[y]
    }

    pub fn inverse(&self) -> StateBijection {
        StateBijection { h: self.h_inv.clone(), h_inv: self.h.clone() }
    }
}

fn check_size(sys: &Dsff, h: &StateBijection) -> Result<(), TransformError> {
    if h.len() == sys.num_states() {
        Ok(())
    } else {
        Err(TransformError::SizeMismatch { expected: sys.num_states(), found: h.len() })
    }
}

pub fn conjugate(sys: &Dsff, h: &StateBijection) -> Result<Dsff, TransformError> {
    check_size(sys, h)?;
    let idx = sys.indexing();
    let map = StateMap::from_fn(idx, |y| h.apply(sys.step(h.apply_inv(y))))?;
    let outputs = sys.outputs().iter().map(|g| FuncTable::from_fn(idx, |y| g.eval(h.apply_inv(y)))).collect();
    Ok(Dsff::new(map, outputs)?)
}

/// Verifies `F̃∘h = h∘F` and `g̃∘h = g` at every state.
pub fn check_conjugate(s1: &Dsff, s2: &Dsff, h: &StateBijection) -> Result<(), TransformError> {
    check_size(s1, h)?;
    if s1.indexing() != s2.indexing() || s1.m() != s2.m() {
        return Err(TransformError::NotConjugate(0));
    }
    for x in s1.indexing().states() {
        let hx = h.apply(x);
        if s2.step(hx) != h.apply(s1.step(x)) || s2.output(hx) != s1.output(x) {
            return Err(TransformError::NotConjugate(x));
        }
    }
    Ok(())
}

/// Builds both canonical realizations and compares them: equal `N`, `K`, `Γ`,
/// and `ψ̂₂(h(x)) = ψ̂₁(x)` at every state.
pub fn lor_invariance_check(s1: &Dsff, s2: &Dsff, h: &StateBijection) -> Result<bool, TransformError> {
    check_conjugate(s1, s2, h)?;
    let (l1, l2) = (build_lor(s1), build_lor(s2));
    if l1.dim() != l2.dim() || l1.kmat() != l2.kmat() || l1.gamma() != l2.gamma() {
        return Ok(false);
    }
    let (w1, w2) = (l1.subspace(), l2.subspace());
    Ok(s1.indexing().states().all(|x| w2.psi_hat(h.apply(x)) == w1.psi_hat(x)))
}
