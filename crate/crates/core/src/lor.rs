//! The smallest Koopman-invariant subspace containing the output functions,
//! and the linear output realization `y(k+1) = K·y(k)`, `z̃(k) = Γ·y(k)` on it.

use thiserror::Error;

use crate::funcspace::{koopman_apply, FuncTable};
use crate::gf::{Elem, Field};
use crate::linalg::{BasisBuilder, Insertion, LinalgError, Matrix};
use crate::system::{Dsff, OutputSequence, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LorError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Basis `ψ_1..ψ_N` of the invariant subspace, in construction order.
///
/// The basis is a concatenation of Koopman chains `g_i, 𝒦g_i, …, 𝒦^(l_i−1) g_i`,
/// one per output function that was not already spanned when visited.
#[derive(Debug, Clone)]
pub struct InvariantSubspace {
    basis: Vec<FuncTable>,
    chain_lengths: Vec<usize>,
    generators_used: Vec<usize>,
    span: BasisBuilder,
    num_states: usize,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FuncTable] {
        &self.basis
    }

    /// `l_i` for each entry of [`generators_used`](Self::generators_used).
    pub fn chain_lengths(&self) -> &[usize] {
        &self.chain_lengths
    }

    /// 0-based indices of the output functions that started a chain.
    pub fn generators_used(&self) -> &[usize] {
        &self.generators_used
    }

    /// Coordinates of `psi` in the basis, if it lies in the subspace.
    pub fn coordinates(&self, psi: &FuncTable) -> Option<Vec<Elem>> {
        self.span.express(psi.values()).expect("function tables share the ambient dimension")
    }

    /// `ψ̂(x) = (ψ_1(x), …, ψ_N(x))`.
    pub fn psi_hat(&self, x: usize) -> Vec<Elem> {
        self.basis.iter().map(|psi| psi.eval(x)).collect()
    }
}

pub fn build_invariant_subspace(sys: &Dsff) -> InvariantSubspace {
    let mut span = BasisBuilder::new(sys.field(), sys.num_states());
    let mut basis = Vec::new();
    let mut chain_lengths = Vec::new();
    let mut generators_used = Vec::new();

    // Outputs are visited in ascending index; spanned ones are skipped.
    for (i, g) in sys.outputs().iter().enumerate() {
        let mut current = g.clone();
        let mut length = 0;
        loop {
            let inserted = span.insert(current.values()).expect("function tables share the ambient dimension");
            match inserted {
                Insertion::Independent(_) => {
                    let next = koopman_apply(&current, sys.transition()).expect("same state space");
                    basis.push(current);
                    current = next;
                    length += 1;
                }
                Insertion::Dependent(_) => break,
            }
        }
        if length > 0 {
            chain_lengths.push(length);
            generators_used.push(i);
        }
    }
    InvariantSubspace { basis, chain_lengths, generators_used, span, num_states: sys.num_states() }
}

/// A linear output realization of a system.
#[derive(Debug, Clone)]
pub struct Lor {
    field: Field,
    kmat: Matrix,
    gamma: Matrix,
    subspace: InvariantSubspace,
}

impl Lor {
    /// `N`.
    pub fn dim(&self) -> usize {
        self.kmat.rows()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Row `i` holds the coordinates of `𝒦ψ_i`.
    pub fn kmat(&self) -> &Matrix {
        &self.kmat
    }

    /// Row `r` holds the coordinates of `g_r`.
    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    pub fn subspace(&self) -> &InvariantSubspace {
        &self.subspace
    }

    pub fn output_dim(&self) -> usize {
        self.gamma.rows()
    }

    /// `y ↦ K·y`; on lifted states this is `ψ̂(x) ↦ ψ̂(F(x))`.
    pub fn step(&self, y: &[Elem]) -> Vec<Elem> {
        self.kmat.mat_vec(&self.field, y).expect("state has dimension N")
    }

    pub fn observe(&self, y: &[Elem]) -> Vec<Elem> {
        self.gamma.mat_vec(&self.field, y).expect("state has dimension N")
    }
}

pub fn assemble_lor(sys: &Dsff, subspace: InvariantSubspace) -> Lor {
    let n = subspace.dim();
    let mut krows = Vec::with_capacity(n);
    for psi in subspace.basis() {
        let image = koopman_apply(psi, sys.transition()).expect("same state space");
        krows.push(subspace.coordinates(&image).expect("subspace is Koopman-invariant"));
    }
    let grows: Vec<Vec<Elem>> = sys
        .outputs()
        .iter()
        .map(|g| subspace.coordinates(g).expect("subspace contains every output function"))
        .collect();
    Lor {
        field: sys.field().clone(),
        kmat: Matrix::from_rows(n, &krows).expect("coordinate rows have length N"),
        gamma: Matrix::from_rows(n, &grows).expect("coordinate rows have length N"),
        subspace,
    }
}

pub fn build_lor(sys: &Dsff) -> Lor {
    assemble_lor(sys, build_invariant_subspace(sys))
}

pub fn psi_hat_eval(subspace: &InvariantSubspace, x: usize) -> Result<Vec<Elem>, LorError> {
    if x >= subspace.num_states {
        return Err(SystemError::InvalidState(x).into());
    }
    Ok(subspace.psi_hat(x))
}

/// `z̃(k) = Γ·K^k·y0` for `k = 0..steps`.
pub fn lor_simulate(lor: &Lor, y0: &[Elem], steps: usize) -> Result<OutputSequence, LorError> {
    if y0.len() != lor.dim() {
        return Err(LinalgError::DimensionMismatch { expected: lor.dim(), found: y0.len() }.into());
    }
    let mut y = y0.to_vec();
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        samples.push(lor.observe(&y));
        y = lor.step(&y);
    }
    Ok(OutputSequence::new(lor.output_dim(), samples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{coordinate_function, StateIndexing};
    use crate::system::simulate;

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

    fn codes(v: &[Elem]) -> Vec<u32> {
        v.iter().map(|e| e.code()).collect()
    }

    #[test]
    fn lfsr_subspace_and_lor() {
        let sys = two_bit(|a, b| (b, a ^ b));
        let w = build_invariant_subspace(&sys);
        let idx = sys.indexing();
        assert_eq!(w.dim(), 2);
        assert_eq!(w.chain_lengths(), [2]);
        assert_eq!(w.generators_used(), [0]);
        assert_eq!(w.basis()[0], coordinate_function(idx, 1).unwrap());
        assert_eq!(w.basis()[1], coordinate_function(idx, 2).unwrap());
        let lor = assemble_lor(&sys, w);
        assert_eq!(lor.kmat(), &Matrix::from_codes(&[&[0, 1], &[1, 1]]));
        assert_eq!(lor.gamma(), &Matrix::from_codes(&[&[1, 0]]));
        assert_eq!(codes(&psi_hat_eval(lor.subspace(), 1).unwrap()), [1, 0]);
        let z = lor_simulate(&lor, &psi_hat_eval(lor.subspace(), 1).unwrap(), 4).unwrap();
        assert_eq!(z.render(), "1;0;1;1");
        assert_eq!(z, simulate(&sys, 1, 4).unwrap());
        assert!(psi_hat_eval(lor.subspace(), 4).is_err());
    }

    #[test]
    fn identity_subspace_and_lor() {
        let sys = two_bit(|a, b| (a, b));
        let lor = build_lor(&sys);
        assert_eq!(lor.dim(), 1);
        assert_eq!(lor.subspace().chain_lengths(), [1]);
        assert_eq!(lor.kmat(), &Matrix::from_codes(&[&[1]]));
        assert_eq!(lor.gamma(), &Matrix::from_codes(&[&[1]]));
        assert_eq!(lor_simulate(&lor, &[Elem::ONE], 3).unwrap().render(), "1;1;1");
    }

    #[test]
    fn product_subspace_and_lor() {
        let sys = two_bit(|a, b| (a & b, a));
        let lor = build_lor(&sys);
        let idx = sys.indexing();
        let chi1 = coordinate_function(idx, 1).unwrap();
        let chi2 = coordinate_function(idx, 2).unwrap();
        assert_eq!(lor.subspace().basis(), [chi1.clone(), chi1.mul(&chi2).unwrap()]);
        assert_eq!(lor.kmat(), &Matrix::from_codes(&[&[0, 1], &[0, 1]]));
        assert_eq!(lor.gamma(), &Matrix::from_codes(&[&[1, 0]]));
        assert_eq!(codes(&psi_hat_eval(lor.subspace(), 3).unwrap()), [1, 1]);
        assert_eq!(codes(&psi_hat_eval(lor.subspace(), 0).unwrap()), [0, 0]);
    }

    #[test]
    fn zero_initial_state_gives_zero_outputs() {
        let sys = two_bit(|a, b| (b, a ^ b));
        let lor = build_lor(&sys);
        let z = lor_simulate(&lor, &[Elem::ZERO, Elem::ZERO], 5).unwrap();
        assert!(z.samples().iter().flatten().all(|e| e.is_zero()));
        assert!(lor_simulate(&lor, &[Elem::ZERO], 5).is_err());
    }

    #[test]
    fn zero_output_function_gives_empty_realization() {
        let idx = StateIndexing::new(&Field::gf2(), 2).unwrap();
        let sys = Dsff::from_fns(&idx, 1, |x| x.to_vec(), |_| vec![Elem::ZERO]).unwrap();
        let lor = build_lor(&sys);
        assert_eq!(lor.dim(), 0);
        assert!(lor.subspace().generators_used().is_empty());
        assert_eq!(lor.gamma().rows(), 1);
        assert_eq!(lor_simulate(&lor, &[], 3).unwrap(), simulate(&sys, 0, 3).unwrap());
    }

    #[test]
    fn spanned_outputs_are_skipped() {
        // A repeated output is already spanned; on the identity map χ2 needs its own chain.
        let idx = StateIndexing::new(&Field::gf2(), 2).unwrap();
        let sys = Dsff::from_fns(&idx, 2, |x| vec![x[1], x[0]], |x| vec![x[0], x[0]]).unwrap();
        let lor = build_lor(&sys);
        assert_eq!(lor.dim(), 2);
        assert_eq!(lor.subspace().generators_used(), [0]);
        assert_eq!(lor.gamma(), &Matrix::from_codes(&[&[1, 0], &[1, 0]]));

        let sys = Dsff::from_fns(&idx, 2, |x| x.to_vec(), |x| vec![x[0], x[1]]).unwrap();
        let lor = build_lor(&sys);
        assert_eq!(lor.subspace().generators_used(), [0, 1]);
        assert_eq!(lor.subspace().chain_lengths(), [1, 1]);
        assert_eq!(lor.kmat(), &Matrix::identity(2));
    }
}
