use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register `{name}` has dimension 0")]
    ZeroDimension { name: String },

    #[error("duplicate register name `{0}`")]
    DuplicateLabel(String),

    #[error("register `{name}` used with dimensions {first} and {second}")]
    ConflictingDimension { name: String, first: usize, second: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("register `{0}` not present")]
    MissingLabel(String),

    #[error("register sets differ: {left:?} vs {right:?}")]
    LabelSetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("coefficient count {got} does not match register dimensions (expected {expected})")]
    CoefficientCount { expected: usize, got: usize },

    #[error("operator is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("site {site} out of range for a model with {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("superposition needs as many weights as branches ({weights} vs {branches})")]
    WeightCount { weights: usize, branches: usize },

    #[error("superposition needs at least one branch")]
    EmptySuperposition,

    #[error("process vectors live on different register sets")]
    RegisterMismatch,

    #[error("strategy `{0}` is not registered")]
    UnknownStrategy(String),

    #[error("strategy `{strategy}` cannot evaluate this input: {reason}")]
    StrategyUnavailable { strategy: String, reason: String },

    #[error("oracle routes disagree by {difference:.3e}")]
    RouteDisagreement { difference: f64 },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
}
