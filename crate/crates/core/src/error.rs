use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTargets(usize),
    #[error("gate {gate} acts on {expected} qubit(s), got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("cannot discard every qubit of the register")]
    DiscardAll,
    #[error("forced outcome {outcome} on qubit {qubit} has probability {probability:e}")]
    ZeroProbabilityOutcome {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },
    #[error("forced outcome list exhausted")]
    OutcomesExhausted,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid noise parameter {name} = {value}")]
    InvalidNoise { name: &'static str, value: f64 },
    #[error("register of {0} qubits exceeds the supported size")]
    SizeOverflow(usize),
    #[error("invalid code parameters n={n}, m={m}")]
    InvalidCode { n: usize, m: usize },
    #[error("loss pattern {0:?} is not recoverable")]
    NotRecoverable(Vec<usize>),
    #[error("target qubit {0} lies in a damaged block")]
    TargetInDamagedBlock(usize),
    #[error("vertex {0} is not in the graph")]
    MissingVertex(usize),
    #[error("rewrite rule precondition violated: {0}")]
    RulePrecondition(String),
    #[error("stabilizer {stabilizer} not satisfied (expectation {expectation})")]
    StabilizerNotSatisfied { stabilizer: String, expectation: f64 },
    #[error("malformed measurement pattern: {0}")]
    MalformedPattern(String),
    #[error("unsupported loss case: {0}")]
    UnsupportedLossCase(String),
    #[error("decomposition term {0} is not covered by any setting")]
    UncoveredTerm(String),
    #[error("parse error: {0}")]
    Parse(String),
}
