use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("qubit index {index} out of range 1..={num_qubits}")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("cannot parse Pauli string {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("assignment does not match array: {0}")]
    AssignmentShape(String),

    #[error("enumeration budget exceeded: {cells} cells needs q <= {max_qubits} (got q = {q})")]
    BudgetExceeded { q: usize, cells: usize, max_qubits: usize },

    #[error("operator {operator} is not Hermitian (phase {phase})")]
    NotHermitian { operator: String, phase: String },

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("dimension mismatch: operator on {operator} qubits, state on {state} qubits")]
    DimensionMismatch { operator: usize, state: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
