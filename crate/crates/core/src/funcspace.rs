//! Scalar functions `F_q^n -> F_q` as dense value tables, and the Koopman
//! pullback `ψ ↦ ψ ∘ F` acting on them.
//!
//! States are indexed little-endian in the coordinates:
//! `index(x) = Σ code(x_i) · q^(i-1)`, so `x_1` varies fastest.

use thiserror::Error;

use crate::gf::{Elem, Field};

/// Largest supported state-space size.
pub const MAX_STATES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuncError {
    #[error("coordinate index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("state space q^n = {q}^{n} exceeds {MAX_STATES} states")]
    StateSpaceTooLarge { q: u32, n: usize },
    #[error("state dimension must be at least 1")]
    ZeroDimension,
    #[error("operands are defined over different state spaces")]
    IndexingMismatch,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state index {0} is out of range")]
    InvalidState(usize),
}

/// Bijection between `F_q^n` and `0..q^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateIndexing {
    field: Field,
    n: usize,
    size: usize,
}

impl StateIndexing {
    pub fn new(field: &Field, n: usize) -> Result<StateIndexing, FuncError> {
        if n == 0 {
            return Err(FuncError::ZeroDimension);
        }
        let q = field.order();
        let size = (q as usize)
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_STATES)
            .ok_or(FuncError::StateSpaceTooLarge { q, n })?;
        Ok(StateIndexing { field: field.clone(), n, size })
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`.
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn check(&self, s: usize) -> Result<usize, FuncError> {
        if s < self.size {
            Ok(s)
        } else {
            Err(FuncError::InvalidState(s))
        }
    }

    /// Coordinates `(x_1, …, x_n)` of state `s`.
    pub fn decode(&self, mut s: usize) -> Vec<Elem> {
        let q = self.field.order() as usize;
        (0..self.n)
            .map(|_| {
                let c = s % q;
                s /= q;
                Elem::from_code(c as u32)
            })
            .collect()
    }

    pub fn encode(&self, x: &[Elem]) -> Result<usize, FuncError> {
        if x.len() != self.n {
            return Err(FuncError::LengthMismatch { expected: self.n, found: x.len() });
        }
        let q = self.field.order() as usize;
        let mut s = 0;
        for e in x.iter().rev() {
            let c = e.code() as usize;
            if c >= q {
                return Err(FuncError::InvalidState(c));
            }
            s = s * q + c;
        }
        Ok(s)
    }

    /// Code of coordinate `i` (1-based) of state `s`.
    #[inline]
    pub fn coordinate(&self, s: usize, i: usize) -> Elem {
        let q = self.field.order() as usize;
        Elem::from_code(((s / q.pow(i as u32 - 1)) % q) as u32)
    }

    /// `(c1,c2,…)` rendering of a state.
    pub fn render_state(&self, s: usize) -> String {
        format!("({})", crate::linalg::render_vector(&self.decode(s), ","))
    }
}

/// A function `F_q^n -> F_q` given by its values on all states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncTable {
    indexing: StateIndexing,
    values: Vec<Elem>,
}

impl FuncTable {
    pub fn new(indexing: &StateIndexing, values: Vec<Elem>) -> Result<FuncTable, FuncError> {
        if values.len() != indexing.size {
            return Err(FuncError::LengthMismatch { expected: indexing.size, found: values.len() });
        }
        Ok(FuncTable { indexing: indexing.clone(), values })
    }

    pub fn from_fn(indexing: &StateIndexing, f: impl FnMut(usize) -> Elem) -> FuncTable {
        FuncTable { indexing: indexing.clone(), values: indexing.states().map(f).collect() }
    }

    pub fn zero(indexing: &StateIndexing) -> FuncTable {
        FuncTable { indexing: indexing.clone(), values: vec![Elem::ZERO; indexing.size] }
    }

    pub fn indexing(&self) -> &StateIndexing {
        &self.indexing
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    #[inline]
    pub fn eval(&self, s: usize) -> Elem {
        self.values[s]
    }

    /// The value array as a vector of length `q^n`.
    pub fn to_vector(&self) -> Vec<Elem> {
        self.values.clone()
    }

    pub fn add(&self, other: &FuncTable) -> Result<FuncTable, FuncError> {
        self.same_space(other)?;
        let f = self.indexing.field();
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FuncTable { indexing: self.indexing.clone(), values })
    }

    pub fn mul(&self, other: &FuncTable) -> Result<FuncTable, FuncError> {
        self.same_space(other)?;
        let f = self.indexing.field();
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f.mul(a, b)).collect();
        Ok(FuncTable { indexing: self.indexing.clone(), values })
    }

    pub fn scale(&self, c: Elem) -> FuncTable {
        let f = self.indexing.field();
        FuncTable { indexing: self.indexing.clone(), values: self.values.iter().map(|&a| f.mul(c, a)).collect() }
    }

    fn same_space(&self, other: &FuncTable) -> Result<(), FuncError> {
        if self.indexing == other.indexing {
            Ok(())
        } else {
            Err(FuncError::IndexingMismatch)
        }
    }
}

pub fn func_to_vector(psi: &FuncTable) -> Vec<Elem> {
    psi.to_vector()
}

/// A total map on the state space, `next[s] = index(F(state(s)))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMap {
    indexing: StateIndexing,
    next: Vec<usize>,
}

impl StateMap {
    pub fn new(indexing: &StateIndexing, next: Vec<usize>) -> Result<StateMap, FuncError> {
        if next.len() != indexing.size {
            return Err(FuncError::LengthMismatch { expected: indexing.size, found: next.len() });
        }
        if let Some(&bad) = next.iter().find(|&&t| t >= indexing.size) {
            return Err(FuncError::InvalidState(bad));
        }
        Ok(StateMap { indexing: indexing.clone(), next })
    }

    pub fn from_fn(indexing: &StateIndexing, mut f: impl FnMut(usize) -> usize) -> Result<StateMap, FuncError> {
        let next = indexing.states().map(&mut f).collect();
        StateMap::new(indexing, next)
    }

    pub fn identity(indexing: &StateIndexing) -> StateMap {
        StateMap { indexing: indexing.clone(), next: indexing.states().collect() }
    }

    pub fn indexing(&self) -> &StateIndexing {
        &self.indexing
    }

    #[inline]
    pub fn apply(&self, s: usize) -> usize {
        self.next[s]
    }

    pub fn table(&self) -> &[usize] {
        &self.next
    }

    /// `F^(j)(s)`.
    pub fn iterate(&self, mut s: usize, j: usize) -> usize {
        for _ in 0..j {
            s = self.next[s];
        }
        s
    }
}

/// `i`-th coordinate function `χ_i(x) = x_i`, 1-based.
pub fn coordinate_function(indexing: &StateIndexing, i: usize) -> Result<FuncTable, FuncError> {
    if i == 0 || i > indexing.n {
        return Err(FuncError::IndexOutOfRange { index: i, n: indexing.n });
    }
    Ok(FuncTable::from_fn(indexing, |s| indexing.coordinate(s, i)))
}

/// Koopman pullback `ψ ∘ F`.
pub fn koopman_apply(psi: &FuncTable, map: &StateMap) -> Result<FuncTable, FuncError> {
    if psi.indexing != map.indexing {
        return Err(FuncError::IndexingMismatch);
    }
    Ok(FuncTable { indexing: psi.indexing.clone(), values: map.next.iter().map(|&t| psi.values[t]).collect() })
}
