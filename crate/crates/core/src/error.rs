use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero polynomial")]
    ZeroDenominator,
    #[error("evaluation at pole")]
    Pole,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not square ({0}x{1})")]
    NonSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-generic intersection: {0}")]
    NonGenericIntersection(String),
    #[error("degenerate turn at polyline vertex {0}")]
    DegenerateTurn(usize),
    #[error("approximation too coarse: {0}")]
    ApproximationTooCoarse(String),
    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("nothing to decompose: path is simple")]
    NothingToDecompose,
    #[error("non-generic weights: {0}")]
    NonGenericWeights(String),
    #[error("unbound symbolic weight {0}")]
    UnboundSymbol(String),
    #[error("zero weight on {0}")]
    ZeroWeight(String),
    #[error("case reduction failed: {0}")]
    CaseReductionFailed(String),
    #[error("singular feedback: 1+F vanishes identically")]
    SingularFeedback,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
