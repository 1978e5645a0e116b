use thiserror::Error;

/// Every failure the library can report.
///
/// The budget-related variants are signals, not bugs: `InfeasibleBudget`
/// means the requested parameters are too aggressive for the construction
/// and the caller should shrink the tube radius or relax the budget.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeckError {
    #[error("warp function is not positive at s = {s} (value {value})")]
    NonPositiveWarp { s: f64, value: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("stencil point lies within 2h of the chart boundary (axis {axis})")]
    BoundaryProximity { axis: usize },

    #[error("metric is not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("radius {eps} outside the valid range (0, {limit})")]
    RadiusOutOfRange { eps: f64, limit: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },

    #[error("piece `{0}` is not described by a one-dimensional profile")]
    UnsupportedPiece(String),

    #[error("curve radius {r} leaves the model's valid range (limit {limit})")]
    RadiusExceedsModel { r: f64, limit: f64 },

    #[error("curve parameter {s} outside [0, {length}]")]
    ParameterOutOfRange { s: f64, length: f64 },

    #[error("infeasible budget: {0}")]
    InfeasibleBudget(String),

    #[error("codimension q = {q} is too small; surgery needs q >= 3")]
    CodimensionTooSmall { q: usize },

    #[error("interface mismatch between pieces {left} and {right}: {detail}")]
    InterfaceMismatch { left: usize, right: usize, detail: String },

    #[error("ingredient floor {floor} does not strictly exceed {required}")]
    IngredientFloorTooLow { floor: f64, required: f64 },

    #[error("recomputed floor check failed: {0}")]
    FloorCheckFailed(String),

    #[error("missing ingredient: {0}")]
    MissingIngredient(String),

    #[error("certificate schema violation: {0}")]
    SchemaViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NeckError {
    fn from(e: std::io::Error) -> Self {
        NeckError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NeckError>;
