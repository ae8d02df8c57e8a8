//! Generalized Mermin-Peres magic arrays on `q` qubits.
//!
//! - [`pauli`]: phase-exact Pauli string algebra.
//! - [`array`]: the 3×(q+1) array, its products and commutation structure.
//! - [`classical`]: ±1 assignments and exhaustive classical maxima.
//! - [`quantum`]: statevector expectations and noisy sampling.
//! - [`report`]: the closed-form convergence table.
//! - [`cli`]: the `ksmagic` command line.

pub mod array;
pub mod classical;
pub mod cli;
pub mod error;
pub mod observable;
pub mod pauli;
pub mod quantum;
pub mod report;

pub use array::{find_contradiction_perm, m_of, CommutationReport, MagicArray, Permutation};
pub use classical::{brute_max, eval_xks2, eval_xksq, verify_parity_identity, Assignment, BoundResult, Budget};
pub use error::{Error, Result};
pub use observable::XksForm;
pub use pauli::{Letter, PauliString, Phase};
pub use quantum::{estimate_xks, exact_xks, make_state, run_context, ShotRecord, StateKind, Statevector, XksEstimate};
pub use report::{converge_table, ConvergenceRow};
