use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by an expression that is identically zero")]
    DivisionByZeroExpr,
    #[error("recursive binding for {0}")]
    RecursiveBinding(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),
    #[error("lambda constants must be pairwise distinct: {0}")]
    DegenerateLambdas(String),
    #[error("no total derivative for `{0}` without a covering")]
    UnknownSymbolClass(String),
    #[error("reduction failure: {0}")]
    ReductionFailure(String),
    #[error("gauge factor vanishes: {0}")]
    GaugeDegenerate(String),
    #[error("spectral degree {0} exceeds 1")]
    DegreeTooHigh(usize),
    #[error("commutator does not close: {0}")]
    ClosureFailure(String),
    #[error("nullity failure: {0}")]
    NullityFailure(String),
    #[error("closedness failure: {0}")]
    ClosednessFailure(String),
    #[error("eigenparameters must be pairwise distinct: {0}")]
    DegenerateEigenparams(String),
    #[error("web distributions are not transversal: {0}")]
    TransversalityFailure(String),
    #[error("missing covering rule for `{0}`")]
    MissingRule(String),
    #[error("cannot isolate covering derivatives: {0}")]
    SolveFailure(String),
    #[error("covering is not compatible: {0}")]
    CompatibilityFailure(String),
}

pub type Result<T> = core::result::Result<T, Error>;
