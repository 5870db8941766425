use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin count mismatch: {left} vs {right}")]
    SpinMismatch { left: usize, right: usize },

    #[error("spin index {index} out of range for a {nspins}-spin system")]
    IndexOutOfRange { index: usize, nspins: usize },

    #[error("spin indices of a gate must be distinct")]
    RepeatedIndex,

    #[error("{nspins} spins exceeds the dense limit of {max}")]
    DimensionOverflow { nspins: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("code `{code}` needs its ancillae in the pure |0> state")]
    WrongAncillaState { code: String },

    #[error("basis states are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("invalid pauli label `{0}`")]
    InvalidLabel(String),

    #[error("fixture line {line}: {message}")]
    FixtureParse { line: usize, message: String },

    #[error("fixture is missing rows: {0:?}")]
    MissingFixtureRows(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
