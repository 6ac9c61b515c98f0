//! Observability of a system through its linear output realization.
//!
//! The realization itself is always observable: its observability matrix
//! `O = [Γ; ΓK; …; ΓK^(N−1)]` has rank `N`, because every basis function is
//! some `g_i ∘ F^(j)` with `j < N` and so appears among the rows. The system is
//! observable exactly when the lift `ψ̂` is injective, and `N` outputs always
//! suffice to pin down `ψ̂(x0)`.

use std::collections::HashMap;

use thiserror::Error;

use crate::funcspace::{coordinate_function, StateIndexing};
use crate::gf::{Elem, Field};
use crate::linalg::{char_poly, rank, solve, LinalgError, Matrix, Solution};
use crate::lor::{build_lor, Lor};
use crate::system::{Dsff, OutputSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservabilityError {
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("output sequence has {found} samples; at least N = {required} are required")]
    SequenceTooShort { required: usize, found: usize },
    #[error("output samples have width {found}, the system has {expected} outputs")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Stacked blocks `Γ·K^i`, `i = 0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityMatrix {
    matrix: Matrix,
    block_rows: usize,
}

impl ObservabilityMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The block `Γ·K^i`.
    pub fn block(&self, i: usize) -> Matrix {
        let rows: Vec<Vec<Elem>> =
            (i * self.block_rows..(i + 1) * self.block_rows).map(|r| self.matrix.row(r).to_vec()).collect();
        Matrix::from_rows(self.matrix.cols(), &rows).expect("block rows share the column count")
    }
}

pub fn observability_matrix(lor: &Lor) -> Result<ObservabilityMatrix, ObservabilityError> {
    let f = lor.field();
    let n = lor.dim();
    let mut blocks = Vec::with_capacity(n);
    let mut block = lor.gamma().clone();
    for _ in 0..n {
        let next = block.mat_mul(f, lor.kmat())?;
        blocks.push(block);
        block = next;
    }
    let matrix = Matrix::vstack(n, &blocks)?;
    let r = rank(f, &matrix);
    if r != n {
        return Err(ObservabilityError::InternalInvariantViolation(format!(
            "observability matrix has rank {r}, expected N = {n}"
        )));
    }
    Ok(ObservabilityMatrix { matrix, block_rows: lor.output_dim() })
}

/// Injectivity of `ψ̂` over the whole state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Injectivity {
    pub injective: bool,
    /// First collision in state-index order: an earlier state and the later one sharing its lift.
    pub witness: Option<(usize, usize)>,
}

/// Map from lifted value `ψ̂(x)` to every state with that value, in state-index order.
#[derive(Debug, Clone)]
pub struct PreimageIndex {
    map: HashMap<Vec<Elem>, Vec<usize>>,
    first_collision: Option<(usize, usize)>,
}

impl PreimageIndex {
    pub fn new(sys: &Dsff, lor: &Lor) -> PreimageIndex {
        let mut map: HashMap<Vec<Elem>, Vec<usize>> = HashMap::new();
        let mut first_collision = None;
        for s in sys.indexing().states() {
            let states = map.entry(lor.subspace().psi_hat(s)).or_default();
            if first_collision.is_none() {
                if let Some(&earlier) = states.first() {
                    first_collision = Some((earlier, s));
                }
            }
            states.push(s);
        }
        PreimageIndex { map, first_collision }
    }

    pub fn preimages(&self, y: &[Elem]) -> &[usize] {
        self.map.get(y).map_or(&[], Vec::as_slice)
    }

    pub fn injectivity(&self) -> Injectivity {
        Injectivity { injective: self.first_collision.is_none(), witness: self.first_collision }
    }
}

pub fn check_injectivity(sys: &Dsff, lor: &Lor) -> Injectivity {
    PreimageIndex::new(sys, lor).injectivity()
}

/// Whether every coordinate function lies in the invariant subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinateMembership {
    /// `C` (n×N) with `χ̂ = C·ψ̂`.
    Present(Matrix),
    /// 1-based index of the first coordinate function outside the subspace.
    Absent { first_missing: usize },
}

pub fn coordinate_membership(sys: &Dsff, lor: &Lor) -> CoordinateMembership {
    let idx = sys.indexing();
    let mut rows = Vec::with_capacity(idx.n());
    for i in 1..=idx.n() {
        let chi = coordinate_function(idx, i).expect("index within 1..=n");
        match lor.subspace().coordinates(&chi) {
            Some(c) => rows.push(c),
            None => return CoordinateMembership::Absent { first_missing: i },
        }
    }
    CoordinateMembership::Present(Matrix::from_rows(lor.dim(), &rows).expect("rows have length N"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    Unique(usize),
    /// Every state producing the sequence, in state-index order (at least two).
    Ambiguous(Vec<usize>),
    InconsistentSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub classification: Reconstruction,
    /// `ψ̂(x0)`, when the linear stage found one.
    pub y0: Option<Vec<Elem>>,
}

impl ReconstructionResult {
    fn inconsistent(y0: Option<Vec<Elem>>) -> Self {
        ReconstructionResult { classification: Reconstruction::InconsistentSequence, y0 }
    }
}

/// Cached state for repeated reconstruction against one system.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    field: Field,
    n: usize,
    m: usize,
    obs: ObservabilityMatrix,
    alphas: Vec<Elem>,
    preimages: PreimageIndex,
}

impl Reconstructor {
    pub fn new(sys: &Dsff, lor: &Lor) -> Result<Reconstructor, ObservabilityError> {
        Ok(Reconstructor {
            field: sys.field().clone(),
            n: lor.dim(),
            m: sys.m(),
            obs: observability_matrix(lor)?,
            alphas: char_poly(lor.field(), lor.kmat())?,
            preimages: PreimageIndex::new(sys, lor),
        })
    }

    pub fn observability(&self) -> &ObservabilityMatrix {
        &self.obs
    }

    /// `α_1..α_N` of the characteristic polynomial of `K`.
    pub fn alphas(&self) -> &[Elem] {
        &self.alphas
    }

    pub fn preimage_index(&self) -> &PreimageIndex {
        &self.preimages
    }

    pub fn tail_check(&self, z: &OutputSequence) -> bool {
        recurrence_holds(&self.field, &self.alphas, z)
    }

    pub fn reconstruct(&self, z: &OutputSequence) -> Result<ReconstructionResult, ObservabilityError> {
        if z.m() != self.m {
            return Err(ObservabilityError::DimensionMismatch { expected: self.m, found: z.m() });
        }
        if z.len() < self.n {
            return Err(ObservabilityError::SequenceTooShort { required: self.n, found: z.len() });
        }
        if z.len() > self.n && !self.tail_check(z) {
            return Ok(ReconstructionResult::inconsistent(None));
        }
        let stacked: Vec<Elem> = z.samples()[..self.n].iter().flatten().copied().collect();
        let y0 = match solve(&self.field, self.obs.matrix(), &stacked)? {
            Solution::Unique(y0) => y0,
            Solution::Inconsistent => return Ok(ReconstructionResult::inconsistent(None)),
            Solution::Affine { .. } => {
                return Err(ObservabilityError::InternalInvariantViolation(
                    "observability matrix lost full column rank".into(),
                ))
            }
        };
        let classification = match self.preimages.preimages(&y0) {
            [] => Reconstruction::InconsistentSequence,
            [x] => Reconstruction::Unique(*x),
            many => Reconstruction::Ambiguous(many.to_vec()),
        };
        Ok(ReconstructionResult { classification, y0: Some(y0) })
    }

    pub fn sequence_observable(&self, z: &OutputSequence) -> Result<bool, ObservabilityError> {
        Ok(matches!(self.reconstruct(z)?.classification, Reconstruction::Unique(_)))
    }
}

/// `z(k) = Σ_{i=1..N} α_i · z(k−i)` for every `k ≥ N`, componentwise.
fn recurrence_holds(field: &Field, alphas: &[Elem], z: &OutputSequence) -> bool {
    let n = alphas.len();
    let s = z.samples();
    (n..s.len()).all(|k| {
        (0..z.m()).all(|c| {
            let predicted = alphas
                .iter()
                .enumerate()
                .fold(Elem::ZERO, |acc, (i, &a)| field.add(acc, field.mul(a, s[k - i - 1][c])));
            predicted == s[k][c]
        })
    })
}

/// Checks samples beyond the first `N` against the characteristic recurrence of `K`.
/// Sequences of length at most `N` pass vacuously.
pub fn cayley_hamilton_tail_check(lor: &Lor, z: &OutputSequence) -> bool {
    let alphas = char_poly(lor.field(), lor.kmat()).expect("K is square");
    recurrence_holds(lor.field(), &alphas, z)
}

pub fn reconstruct(sys: &Dsff, lor: &Lor, z: &OutputSequence) -> Result<ReconstructionResult, ObservabilityError> {
    Reconstructor::new(sys, lor)?.reconstruct(z)
}

pub fn sequence_observable(sys: &Dsff, lor: &Lor, z: &OutputSequence) -> Result<bool, ObservabilityError> {
    Reconstructor::new(sys, lor)?.sequence_observable(z)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityReport {
    /// Dimension `N` of the realization.
    pub dim: usize,
    pub lor_observable: bool,
    pub psi_injective: bool,
    pub collision_witness: Option<(usize, usize)>,
    pub coords_in_w: bool,
    pub cmat: Option<Matrix>,
    pub system_observable: bool,
    /// Number of outputs that always suffices for reconstruction.
    pub output_bound: usize,
}

impl ObservabilityReport {
    /// `key:value` lines.
    pub fn render(&self, idx: &StateIndexing) -> String {
        let mut lines = vec![
            format!("N:{}", self.dim),
            format!("lor_observable:{}", self.lor_observable),
            format!("system_observable:{}", self.system_observable),
            format!("psi_injective:{}", self.psi_injective),
        ];
        if let Some((a, b)) = self.collision_witness {
            lines.push(format!("collision_witness:{}|{}", idx.render_state(a), idx.render_state(b)));
        }
        lines.push(format!("coords_in_W:{}", self.coords_in_w));
        lines.push(format!("output_bound:{}", self.output_bound));
        lines.join("\n")
    }
}

/// Report for a system whose realization is already built.
pub fn analyze_lor(sys: &Dsff, lor: &Lor) -> Result<ObservabilityReport, ObservabilityError> {
    observability_matrix(lor)?;
    let inj = check_injectivity(sys, lor);
    let cmat = match coordinate_membership(sys, lor) {
        CoordinateMembership::Present(c) => Some(c),
        CoordinateMembership::Absent { .. } => None,
    };
    if cmat.is_some() && !inj.injective {
        return Err(ObservabilityError::InternalInvariantViolation(
            "coordinate functions lie in W but the lift is not injective".into(),
        ));
    }
    Ok(ObservabilityReport {
        dim: lor.dim(),
        lor_observable: true,
        psi_injective: inj.injective,
        collision_witness: inj.witness,
        coords_in_w: cmat.is_some(),
        cmat,
        system_observable: inj.injective,
        output_bound: lor.dim(),
    })
}

pub fn analyze(sys: &Dsff) -> Result<ObservabilityReport, ObservabilityError> {
    analyze_lor(sys, &build_lor(sys))
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn lfsr() -> Dsff {
        two_bit(|a, b| (b, a ^ b))
    }
    fn identity() -> Dsff {
        two_bit(|a, b| (a, b))
    }
    fn product() -> Dsff {
        two_bit(|a, b| (a & b, a))
    }

    fn seq(codes: &[u32]) -> OutputSequence {
        OutputSequence::new(1, codes.iter().map(|&c| vec![Elem::from_code(c)]).collect()).unwrap()
    }

    #[test]
    fn observability_matrix_examples() {
        let m = observability_matrix(&build_lor(&lfsr())).unwrap();
        assert_eq!(m.matrix(), &Matrix::identity(2));
        assert_eq!(m.block(1), Matrix::from_codes(&[&[0, 1]]));
        assert_eq!(observability_matrix(&build_lor(&identity())).unwrap().matrix(), &Matrix::identity(1));
        assert_eq!(observability_matrix(&build_lor(&product())).unwrap().matrix(), &Matrix::identity(2));
    }

    #[test]
    fn injectivity_examples() {
        let sys = lfsr();
        assert_eq!(check_injectivity(&sys, &build_lor(&sys)), Injectivity { injective: true, witness: None });
        let sys = identity();
        assert_eq!(check_injectivity(&sys, &build_lor(&sys)), Injectivity { injective: false, witness: Some((0, 2)) });
        let sys = product();
        assert_eq!(check_injectivity(&sys, &build_lor(&sys)), Injectivity { injective: false, witness: Some((0, 2)) });
    }

    #[test]
    fn membership_examples() {
        let sys = lfsr();
        assert_eq!(coordinate_membership(&sys, &build_lor(&sys)), CoordinateMembership::Present(Matrix::identity(2)));
        let sys = identity();
        assert_eq!(coordinate_membership(&sys, &build_lor(&sys)), CoordinateMembership::Absent { first_missing: 2 });
        let sys = product();
        assert_eq!(coordinate_membership(&sys, &build_lor(&sys)), CoordinateMembership::Absent { first_missing: 2 });
    }

    #[test]
    fn reconstruct_examples() {
        let sys = lfsr();
        let lor = build_lor(&sys);
        let r = reconstruct(&sys, &lor, &seq(&[1, 0])).unwrap();
        assert_eq!(r.classification, Reconstruction::Unique(1));
        assert_eq!(r.y0, Some(vec![Elem::ONE, Elem::ZERO]));
        assert_eq!(
            reconstruct(&sys, &lor, &seq(&[1, 0, 0])).unwrap().classification,
            Reconstruction::InconsistentSequence
        );
        assert_eq!(
            reconstruct(&sys, &lor, &seq(&[1])),
            Err(ObservabilityError::SequenceTooShort { required: 2, found: 1 })
        );
        let two_wide = OutputSequence::new(2, vec![vec![Elem::ZERO; 2]; 2]).unwrap();
        assert_eq!(
            reconstruct(&sys, &lor, &two_wide),
            Err(ObservabilityError::DimensionMismatch { expected: 1, found: 2 })
        );

        let sys = product();
        let lor = build_lor(&sys);
        assert_eq!(
            reconstruct(&sys, &lor, &seq(&[0, 0])).unwrap().classification,
            Reconstruction::Ambiguous(vec![0, 2])
        );
        assert_eq!(reconstruct(&sys, &lor, &seq(&[1, 1])).unwrap().classification, Reconstruction::Unique(3));
        assert!(sequence_observable(&sys, &lor, &seq(&[1, 1])).unwrap());
        assert!(!sequence_observable(&sys, &lor, &seq(&[0, 0])).unwrap());
        // y0 = (0,1) solves the linear stage but no state lifts to it.
        let r = reconstruct(&sys, &lor, &seq(&[0, 1])).unwrap();
        assert_eq!(r.classification, Reconstruction::InconsistentSequence);
        assert_eq!(r.y0, Some(vec![Elem::ZERO, Elem::ONE]));
    }

    #[test]
    fn lfsr_trajectories_are_observable() {
        let sys = lfsr();
        let lor = build_lor(&sys);
        for x0 in 0..4 {
            assert!(sequence_observable(&sys, &lor, &simulate(&sys, x0, 2).unwrap()).unwrap());
        }
    }

    #[test]
    fn tail_check_examples() {
        let lor = build_lor(&lfsr());
        assert!(cayley_hamilton_tail_check(&lor, &seq(&[1, 0, 1, 1])));
        assert!(!cayley_hamilton_tail_check(&lor, &seq(&[1, 0, 0])));
        assert!(cayley_hamilton_tail_check(&lor, &seq(&[0; 9])));
        assert!(cayley_hamilton_tail_check(&build_lor(&product()), &seq(&[0; 9])));
    }

    #[test]
    fn analyze_examples() {
        let r = analyze(&lfsr()).unwrap();
        assert_eq!(
            (r.dim, r.psi_injective, r.coords_in_w, r.system_observable, r.output_bound),
            (2, true, true, true, 2)
        );
        assert!(r.lor_observable);
        let r = analyze(&identity()).unwrap();
        assert_eq!((r.dim, r.psi_injective, r.system_observable), (1, false, false));
        assert_eq!(r.collision_witness, Some((0, 2)));
        let r = analyze(&product()).unwrap();
        assert_eq!((r.dim, r.psi_injective, r.coords_in_w, r.system_observable), (2, false, false, false));
        assert_eq!(
            analyze(&identity()).unwrap().render(identity().indexing()),
            "N:1\nlor_observable:true\nsystem_observable:false\npsi_injective:false\n\
             collision_witness:(0,0)|(0,1)\ncoords_in_W:false\noutput_bound:1"
        );
    }
}
