use thiserror::Error;

pub type Result<T, E = HbError> = std::result::Result<T, E>;

/// Errors raised by the library. Numerical payloads are reported in `f64`
/// regardless of the working precision.
#[derive(Debug, Error)]
pub enum HbError {
    #[error("grid size {grid} cannot resolve degree {degree}: need a power of two >= {required}")]
    GridTooSmall {
        grid: usize,
        degree: usize,
        required: usize,
    },

    #[error("samples are not analytic on the grid: negative-frequency mass ratio {mass:.3e}")]
    NotAnalytic { mass: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("point with modulus {modulus} is outside the open unit disk")]
    Domain { modulus: f64 },

    #[error("series is not invertible at the origin: |d(0)| = {0:.3e}")]
    NotInvertibleAtOrigin(f64),

    #[error("log-integrability violated (numerically): {trimmed} of {total} grid points below the degeneracy threshold")]
    LogIntegrability { trimmed: usize, total: usize },

    #[error("degenerate symbol: {0}")]
    Degenerate(String),

    #[error(
        "factorization failed to converge: residual {residual:.3e} after {iterations} iterations"
    )]
    Convergence {
        residual: f64,
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("outside the analytic-neighbourhood hypothesis: {0}")]
    Hypothesis(String),

    #[error("tail budget unbounded: {0}")]
    Precision(String),

    #[error("coefficients requested to degree {requested} but only {available} are stored")]
    ExtensionRequired { requested: usize, available: usize },

    #[error("component index {index} out of range 1..={n}")]
    Index { index: usize, n: usize },

    #[error("Schur condition violated: boundary sup of the row norm is {0}")]
    SchurViolation(f64),

    #[error("Gram matrix refused: condition number {condition:.3e} exceeds cap {cap:.1e}")]
    IllConditioned { condition: f64, cap: f64 },

    #[error("oracle declined after {} doublings without converging", history.len())]
    OracleDeclined { history: Vec<(usize, f64)> },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HbError {
    /// Process exit code used by the command-line front end:
    /// 2 hypothesis violation, 3 numerical failure, 4 I/O or schema.
    pub fn exit_code(&self) -> i32 {
        use HbError::*;
        match self {
            Domain { .. }
            | LogIntegrability { .. }
            | Degenerate(_)
            | Hypothesis(_)
            | Index { .. }
            | SchurViolation(_)
            | Invalid(_)
            | Shape(_) => 2,
            GridTooSmall { .. }
            | NotAnalytic { .. }
            | NotInvertibleAtOrigin(_)
            | Convergence { .. }
            | Precision(_)
            | ExtensionRequired { .. }
            | IllConditioned { .. }
            | OracleDeclined { .. }
            | Singular(_) => 3,
            Schema(_) | Io(_) => 4,
        }
    }
}

impl From<serde_json::Error> for HbError {
    fn from(e: serde_json::Error) -> Self {
        HbError::Schema(e.to_string())
    }
}
