use thiserror::Error;

/// Errors produced by constructions, parsers and group computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing table cell for state `{state}` and letter `{letter}`")]
    MissingCell { state: String, letter: String },

    #[error("duplicate table cell for state `{state}` and letter `{letter}`")]
    DuplicateCell { state: String, letter: String },

    #[error("invalid symbol set: {0}")]
    Symbols(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("automaton is not {property}: {witness}")]
    Property {
        property: &'static str,
        witness: String,
    },

    #[error("alphabet mismatch: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },

    #[error("generating set is empty")]
    EmptyGenerators,

    #[error("seed word is empty")]
    EmptySeed,

    #[error("invalid marked group: {0}")]
    InvalidMarking(String),

    #[error("automaton is not compatible with the marked group: {0}")]
    Incompatible(String),

    #[error("graph has {vertices} vertices, exceeding the search cap of {cap}")]
    CapExceeded { vertices: usize, cap: usize },

    #[error("automorphism count exceeds the result cap of {cap}")]
    TooManyResults { cap: usize },

    #[error("element has finite order {order}")]
    Torsion { order: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
