use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("node at byte {pos} has {arity} children, expected 2")]
    NonBinary { pos: usize, arity: usize },
    #[error("leaf label {label:?} at byte {pos} is not a positive integer")]
    BadLabel { pos: usize, label: String },
    #[error("duplicate leaf label {0}")]
    DuplicateLabel(u32),
    #[error("{what} = {value} out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: &'static str,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("labeling has odd parity")]
    OddParity,
    #[error("invalid NNI triple: {0}")]
    BadTriple(String),
    #[error("not an order ideal: node {0} has a descendant outside the set")]
    NotOrderIdeal(usize),
    #[error("invalid top vector {0}")]
    InvalidTopVector(String),
    #[error(
        "point set is not full-dimensional: affine dimension {dim} in ambient dimension {ambient}"
    )]
    Degenerate {
        dim: usize,
        ambient: usize,
        equalities: Vec<(Vec<i64>, i64)>,
    },
    #[error("polytope has no H-representation")]
    MissingFacets,
    #[error("Ehrhart interpolation failed at m = {m}: predicted {predicted}, counted {counted}")]
    Interpolation {
        m: usize,
        predicted: String,
        counted: String,
    },
    #[error("normalized volume {0} is not an integer")]
    NonIntegerVolume(String),
    #[error("unknown column key {0}")]
    UnknownKey(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("nonpositive branch length {0} on edge above interior node {1}")]
    BranchLength(f64, usize),
    #[error("Fourier classes disagree for top vector {key}: {a} vs {b}")]
    ClassDisagreement { key: String, a: f64, b: f64 },
    #[error("odd Fourier coordinate {key} = {value} is not zero")]
    NonzeroOdd { key: String, value: f64 },
    #[error("generator {0} has no marked initial term")]
    Unmarked(String),
}

pub type Result<T> = std::result::Result<T, Error>;
