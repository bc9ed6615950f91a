use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library. The variant name leads each message so
/// that command-line diagnostics can be matched on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonSquare: matrix is {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("NonFinite: matrix or vector contains NaN or infinite entries")]
    NonFinite,
    #[error("ShapeMismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("NotHermitian: Hermiticity defect {defect:e} exceeds {threshold:e}")]
    NotHermitian { defect: f64, threshold: f64 },
    #[error("NumericalFailure: {0}")]
    NumericalFailure(String),
    #[error("EmptyInput: at least one vector is required")]
    EmptyInput,
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("EmptyKeepSet: partial trace must keep at least one factor")]
    EmptyKeepSet,
    #[error("VectorOutsideSubspace: projection defect {defect:e} exceeds {threshold:e}")]
    VectorOutsideSubspace { defect: f64, threshold: f64 },
    #[error("NotUnit: vector norm {norm} is not 1")]
    NotUnit { norm: f64 },
    #[error("NotOrthonormal: basis Gram defect {defect:e}")]
    NotOrthonormal { defect: f64 },
    #[error("AmbientDimMismatch: subspaces live in dimensions {a} and {b}")]
    AmbientDimMismatch { a: usize, b: usize },
    #[error("EmptyList: at least one item is required")]
    EmptyList,
    #[error("InvalidTolerance: {0}")]
    InvalidTolerance(String),
    #[error("NotPositive: eigenvalue {eigenvalue:e} below allowed {threshold:e}")]
    NotPositive { eigenvalue: f64, threshold: f64 },
    #[error("TraceNotOne: trace is {trace} (expected 1 within 1e-8)")]
    TraceNotOne { trace: f64 },
    #[error("InvalidEnsemble: {0}")]
    InvalidEnsemble(String),
    #[error("StateOutsideSupport: component of norm {defect:e} lies in the null space")]
    StateOutsideSupport { defect: f64 },
    #[error("CommonStateMismatch: ensemble {index} does not start with the common state (overlap {overlap})")]
    CommonStateMismatch { index: usize, overlap: f64 },
    #[error("ZeroCommonWeight: ensemble {index} gives the common state zero weight")]
    ZeroCommonWeight { index: usize },
    #[error("FewerThanTwoObservers: got {0}")]
    FewerThanTwoObservers(usize),
    #[error("ZeroProjection: observer {0} has zero probability of the index-0 outcome")]
    ZeroProjection(usize),
    #[error("IncompatibleInputs: the supports share no common state")]
    IncompatibleInputs,
}
