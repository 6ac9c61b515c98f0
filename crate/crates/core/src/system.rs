//! Autonomous systems `x(k+1) = F(x(k))`, `z(k) = g(x(k))` over `F_q^n`.

use std::collections::HashMap;

use thiserror::Error;

use crate::funcspace::{FuncError, FuncTable, StateIndexing, StateMap};
use crate::gf::{Elem, Field};
use crate::linalg::render_vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("a system needs at least one output function")]
    NoOutputs,
    #[error("transition and output functions use different state spaces")]
    IndexingMismatch,
    #[error("state index {0} is out of range")]
    InvalidState(usize),
    #[error("output sample {index} has {found} entries, expected {expected}")]
    SampleWidth { index: usize, expected: usize, found: usize },
    #[error(transparent)]
    Func(#[from] FuncError),
}

/// A dynamical system over a finite field, given by total tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dsff {
    transition: StateMap,
    outputs: Vec<FuncTable>,
}

impl Dsff {
    pub fn new(transition: StateMap, outputs: Vec<FuncTable>) -> Result<Dsff, SystemError> {
        if outputs.is_empty() {
            return Err(SystemError::NoOutputs);
        }
        if outputs.iter().any(|g| g.indexing() != transition.indexing()) {
            return Err(SystemError::IndexingMismatch);
        }
        Ok(Dsff { transition, outputs })
    }

    /// Builds the tables by evaluating coordinate-wise rules at every state.
    pub fn from_fns(
        indexing: &StateIndexing,
        m: usize,
        mut next: impl FnMut(&[Elem]) -> Vec<Elem>,
        mut out: impl FnMut(&[Elem]) -> Vec<Elem>,
    ) -> Result<Dsff, SystemError> {
        let mut targets = Vec::with_capacity(indexing.size());
        let mut columns = vec![Vec::with_capacity(indexing.size()); m];
        for s in indexing.states() {
            let x = indexing.decode(s);
            targets.push(indexing.encode(&next(&x))?);
            let z = out(&x);
            if z.len() != m {
                return Err(SystemError::SampleWidth { index: s, expected: m, found: z.len() });
            }
            for (col, v) in columns.iter_mut().zip(z) {
                col.push(v);
            }
        }
        let transition = StateMap::new(indexing, targets)?;
        let outputs = columns.into_iter().map(|c| FuncTable::new(indexing, c)).collect::<Result<_, _>>()?;
        Dsff::new(transition, outputs)
    }

    pub fn indexing(&self) -> &StateIndexing {
        self.transition.indexing()
    }

    pub fn field(&self) -> &Field {
        self.indexing().field()
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.indexing().n()
    }

    /// Output dimension.
    pub fn m(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_states(&self) -> usize {
        self.indexing().size()
    }

    pub fn transition(&self) -> &StateMap {
        &self.transition
    }

    pub fn outputs(&self) -> &[FuncTable] {
        &self.outputs
    }

    #[inline]
    pub fn step(&self, s: usize) -> usize {
        self.transition.apply(s)
    }

    /// `g(state(s))`.
    pub fn output(&self, s: usize) -> Vec<Elem> {
        self.outputs.iter().map(|g| g.eval(s)).collect()
    }

    pub fn check_state(&self, s: usize) -> Result<usize, SystemError> {
        self.indexing().check(s).map_err(|_| SystemError::InvalidState(s))
    }
}

/// Output samples `z(0), …, z(K-1)`, each of width `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputSequence {
    m: usize,
    samples: Vec<Vec<Elem>>,
}

impl OutputSequence {
    pub fn new(m: usize, samples: Vec<Vec<Elem>>) -> Result<OutputSequence, SystemError> {
        if let Some((index, s)) = samples.iter().enumerate().find(|(_, s)| s.len() != m) {
            return Err(SystemError::SampleWidth { index, expected: m, found: s.len() });
        }
        Ok(OutputSequence { m, samples })
    }

    pub fn empty(m: usize) -> OutputSequence {
        OutputSequence { m, samples: Vec::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<Elem>] {
        &self.samples
    }

    pub fn prefix(&self, k: usize) -> OutputSequence {
        OutputSequence { m: self.m, samples: self.samples[..k.min(self.len())].to_vec() }
    }

    /// Comma within a sample, semicolon between samples.
    pub fn render(&self) -> String {
        self.samples.iter().map(|s| render_vector(s, ",")).collect::<Vec<_>>().join(";")
    }
}

/// Ultimately periodic orbit shape: `F^(t+ρ)(x0) = F^(t)(x0)` with minimal `t`, `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitStructure {
    pub preperiod: usize,
    pub period: usize,
}

/// Outputs along the trajectory from `x0` for `k = 0..steps`.
pub fn simulate(sys: &Dsff, x0: usize, steps: usize) -> Result<OutputSequence, SystemError> {
    let mut s = sys.check_state(x0)?;
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        samples.push(sys.output(s));
        s = sys.step(s);
    }
    Ok(OutputSequence { m: sys.m(), samples })
}

pub fn orbit_structure(sys: &Dsff, x0: usize) -> Result<OrbitStructure, SystemError> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut s = sys.check_state(x0)?;
    let mut k = 0;
    loop {
        if let Some(&first) = seen.get(&s) {
            return Ok(OrbitStructure { preperiod: first, period: k - first });
        }
        seen.insert(s, k);
        s = sys.step(s);
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::coordinate_function;
    use crate::gf::FieldSpec;
    use proptest::prelude::*;

    fn seq_codes(z: &OutputSequence) -> Vec<u32> {
        z.samples().iter().map(|s| s[0].code()).collect()
    }

    fn two_bit(next: impl Fn(u32, u32) -> (u32, u32)) -> Dsff {
        let idx = StateIndexing::new(&Field::gf2(), 2).unwrap();
        Dsff::from_fns(
            &idx,
            1,
            |x| {
                let (a, b) = next(x[0].code(), x[1].code());
                vec![Elem::from_code(a), Elem::from_code(b)]
            },
            |x| vec![x[0]],
        )
        .unwrap()
    }

    #[test]
    fn simulate_examples() {
        let id = two_bit(|a, b| (a, b));
        assert_eq!(seq_codes(&simulate(&id, 1, 3).unwrap()), [1, 1, 1]);
        let lfsr = two_bit(|a, b| (b, a ^ b));
        assert_eq!(seq_codes(&simulate(&lfsr, 1, 4).unwrap()), [1, 0, 1, 1]);
        let prod = two_bit(|a, b| (a & b, a));
        assert_eq!(seq_codes(&simulate(&prod, 2, 3).unwrap()), [0, 0, 0]);
        assert_eq!(simulate(&prod, 4, 1), Err(SystemError::InvalidState(4)));
        assert_eq!(simulate(&lfsr, 1, 4).unwrap().render(), "1;0;1;1");
    }

    #[test]
    fn orbit_examples() {
        let id = two_bit(|a, b| (a, b));
        for s in 0..4 {
            assert_eq!(orbit_structure(&id, s).unwrap(), OrbitStructure { preperiod: 0, period: 1 });
        }
        let lfsr = two_bit(|a, b| (b, a ^ b));
        assert_eq!(orbit_structure(&lfsr, 1).unwrap(), OrbitStructure { preperiod: 0, period: 3 });
        let prod = two_bit(|a, b| (a & b, a));
        assert_eq!(orbit_structure(&prod, 2).unwrap(), OrbitStructure { preperiod: 1, period: 1 });
    }

    #[test]
    fn construction_errors() {
        let idx = StateIndexing::new(&Field::gf2(), 2).unwrap();
        assert_eq!(Dsff::new(StateMap::identity(&idx), vec![]), Err(SystemError::NoOutputs));
        let other = StateIndexing::new(&Field::gf2(), 1).unwrap();
        assert_eq!(
            Dsff::new(StateMap::identity(&idx), vec![coordinate_function(&other, 1).unwrap()]),
            Err(SystemError::IndexingMismatch)
        );
        assert!(OutputSequence::new(2, vec![vec![Elem::ZERO]]).is_err());
    }

    fn random_system(q_idx: usize, n: usize, table: &[usize], outs: &[u32]) -> Dsff {
        let field = match q_idx {
            0 => Field::gf2(),
            1 => Field::new(&FieldSpec::prime(3)).unwrap(),
            _ => Field::new(&FieldSpec::extension(2, 2, vec![1, 1, 1])).unwrap(),
        };
        let idx = StateIndexing::new(&field, n).unwrap();
        let size = idx.size();
        let q = field.order();
        let map = StateMap::from_fn(&idx, |s| table[s % table.len()] % size).unwrap();
        let g = FuncTable::from_fn(&idx, |s| Elem::from_code(outs[s % outs.len()] % q));
        Dsff::new(map, vec![g]).unwrap()
    }

    proptest! {
        #[test]
        fn simulate_prefix_property(
            q_idx in 0usize..3, n in 1usize..4, table in proptest::collection::vec(0usize..256, 1..64),
            outs in proptest::collection::vec(0u32..4, 1..64), k1 in 0usize..20, extra in 0usize..20
        ) {
            let sys = random_system(q_idx, n, &table, &outs);
            for x0 in sys.indexing().states() {
                let short = simulate(&sys, x0, k1).unwrap();
                let long = simulate(&sys, x0, k1 + extra).unwrap();
                prop_assert_eq!(short, long.prefix(k1));
            }
        }

        #[test]
        fn outputs_ultimately_periodic_with_orbit(
            q_idx in 0usize..3, n in 1usize..4, table in proptest::collection::vec(0usize..256, 1..64),
            outs in proptest::collection::vec(0u32..4, 1..64)
        ) {
            let sys = random_system(q_idx, n, &table, &outs);
            let size = sys.num_states();
            for x0 in sys.indexing().states() {
                let orbit = orbit_structure(&sys, x0).unwrap();
                prop_assert!(orbit.preperiod + orbit.period <= size);
                let z = simulate(&sys, x0, orbit.preperiod + 3 * orbit.period).unwrap();
                for k in orbit.preperiod..orbit.preperiod + 2 * orbit.period {
                    prop_assert_eq!(&z.samples()[k], &z.samples()[k + orbit.period]);
                }
            }
        }
    }
}
