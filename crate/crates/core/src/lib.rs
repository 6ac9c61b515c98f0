//! Observability of nonlinear dynamical systems over finite fields through
//! the Koopman operator.
//!
//! A system `x(k+1) = F(x(k))`, `z(k) = g(x(k))` on `F_q^n` is lifted to the
//! smallest Koopman-invariant subspace of functions containing the outputs.
//! The resulting linear output realization (LOR) decides observability,
//! bounds the number of outputs needed, and reconstructs initial states.
//! A brute-force partition-refinement oracle cross-checks every verdict.

pub mod cli;
pub mod funcspace;
pub mod gf;
pub mod linalg;
pub mod lor;
pub mod observability;
pub mod oracle;
pub mod specfile;
pub mod system;
pub mod transform;

pub use funcspace::{coordinate_function, koopman_apply, FuncTable, StateIndexing, StateMap};
pub use gf::{validate_field, Elem, Field, FieldSpec};
pub use linalg::{BasisBuilder, Matrix, Solution};
pub use lor::{assemble_lor, build_invariant_subspace, build_lor, InvariantSubspace, Lor};
pub use observability::{analyze, ObservabilityReport, ReconstructionResult, Reconstructor};
pub use oracle::{oracle_system, OracleVerdict};
pub use specfile::{elaborate, parse_system, SystemSpec};
pub use system::{Dsff, OutputSequence};
pub use transform::StateBijection;
