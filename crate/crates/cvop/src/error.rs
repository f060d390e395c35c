use thiserror::Error;

#[derive(Debug, Error)]
pub enum CvopError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector must be finite and nonzero: {0:?}")]
    BadVector(Vec<f64>),

    #[error("cone needs at least one generator or one normal")]
    EmptyCone,

    #[error("cone is not pointed: it contains a line (witness direction {witness:?})")]
    NotPointed { witness: Vec<f64> },

    #[error("cone has empty interior")]
    NotSolid,

    #[error("generator and halfspace forms disagree: {0}")]
    InconsistentForms(String),

    #[error("weight base is empty: the bounded-direction cone is trivial, the upper image covers the whole space")]
    EmptyWeightBase,

    #[error("direction {dir:?} is not an interior direction of the required cone")]
    NotInterior { dir: Vec<f64> },

    #[error("operation needs a nonempty set")]
    EmptySet,

    #[error("set is the whole space: recession cone spans every direction")]
    WholeSpace,

    #[error("sets must share the ordering cone and dimension")]
    IncompatibleSets,

    #[error("negative scale {0} is not admissible")]
    NegativeScale(f64),

    #[error("weight {weight:?} lies outside the dual of the ordering cone")]
    InvalidWeight { weight: Vec<f64> },

    #[error("scalarization diverged at weight {weight:?}; the chosen recession cone overstates the problem (unbounded feasible direction {ray:?})")]
    MisclassifiedDivergent { weight: Vec<f64>, ray: Vec<f64> },

    #[error("{0}")]
    NotAmenable(String),

    #[error("solver hit the iteration cap before reaching a verdict")]
    MaxIterations,

    #[error("anchor polytope is empty: no point is below every supporting halfspace")]
    EmptyAnchorPolytope,

    #[error("evidence is inconclusive: {0}")]
    Undetermined(String),

    #[error("unsupported dimension {dim} for {what} (supported: {supported})")]
    Unsupported {
        what: &'static str,
        dim: usize,
        supported: &'static str,
    },

    #[error("invalid problem description: {0}")]
    InvalidProblem(String),

    #[error("gradient check failed for {map} component {component} coordinate {coordinate}: analytic {analytic}, finite difference {numeric}")]
    GradientCheck {
        map: &'static str,
        component: usize,
        coordinate: usize,
        analytic: f64,
        numeric: f64,
    },

    #[error("convexity spot check failed: midpoint defect {defect} at x={x:?}, y={y:?}")]
    ConvexityCheck { defect: f64, x: Vec<f64>, y: Vec<f64> },

    #[error("initial point is not strictly feasible: constraint {index} evaluates to {value}")]
    InfeasibleStart { index: usize, value: f64 },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("json error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CvopError {
    pub fn from_serde(err: serde_json::Error) -> Self {
        CvopError::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
