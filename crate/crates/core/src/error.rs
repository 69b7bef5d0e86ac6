use thiserror::Error;

/// Errors raised by the bowtie library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("at most {max} qubits are supported, got {got}")]
    TooManyQubits { got: usize, max: usize },

    #[error("rotation generator must be a non-identity Pauli string with phase +1")]
    InvalidGenerator,

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("parameter {index} is unbound (vector has {len} entries)")]
    UnboundParameter { index: usize, len: usize },

    #[error("parameter index {0} out of range")]
    InvalidParameter(usize),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),

    #[error("model is not nearest-neighbour: term {0} is not supported on a bond or single site")]
    NotNearestNeighbour(String),

    #[error("term {0} is not covered by the edge schedule")]
    TermNotScheduled(String),

    #[error("invalid colour class label {0}")]
    InvalidClassLabel(usize),

    #[error("edge colouring with {classes} classes is infeasible (max degree {degree})")]
    InfeasibleColouring { classes: usize, degree: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("state of {got} qubits exceeds the dense cap of {cap}")]
    CapExceeded { got: usize, cap: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("numerical abort at step {step}: {msg}")]
    NumericalAbort { step: usize, msg: String },

    #[error("spectral gap {0:e} is below the degeneracy threshold")]
    DegenerateGap(f64),

    #[error("projected matrix element has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unknown backend {0:?}")]
    UnknownBackend(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
