use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero vector does not define a point of projective space")]
    ZeroVector,
    #[error("bidegree mismatch: {left:?} vs {right:?}")]
    BidegreeMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("dimension mismatch: n={left} vs n={right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("form degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("result of differentiation is not horizontal")]
    NonHorizontalResult,
    #[error("wedge degree {0} exceeds real dimension")]
    DegreeOverflow(usize),
    #[error("top form is not a polynomial multiple of the Fubini-Study volume form")]
    NotProportional,
    #[error("operation needs n >= 2 (got n={0})")]
    DimensionTooSmall(usize),
    #[error("metric is not Kaehler")]
    NotKahler,
    #[error("form is not positive: eigenvalue {eigenvalue:e} at {witness:?}")]
    NotPositive { witness: Vec<(f64, f64)>, eigenvalue: f64 },
    #[error("malformed form: {0}")]
    MalformedForm(String),
    #[error("metric is not Gauduchon")]
    NotGauduchon,
    #[error("equator areas disagree: {0:e}")]
    InconsistentAreas(f64),
    #[error("sigma grid of size {grid} is smaller than basis dimension {basis}")]
    GridTooSmall { grid: usize, basis: usize },
    #[error("integral of omega^n is not 1")]
    NotNormalized,
    #[error("direction violates the Gauduchon constraint")]
    NotGauduchonDirection,
    #[error("tangent basis is empty")]
    EmptyBasis,
    #[error("Gram matrix is singular (min eigenvalue {0:e})")]
    SingularGram(f64),
    #[error("path leaves the positive cone at t={0}")]
    PositivityLost(f64),
    #[error("solution changes sign: value {value:e} at {witness:?}")]
    NotPositiveSolution { witness: Vec<(f64, f64)>, value: f64 },
    #[error("linear system is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("exact mode needs a unit point with rational coordinates")]
    NonRationalPoint,
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("serialization: {0}")]
    Serialization(String),
}
