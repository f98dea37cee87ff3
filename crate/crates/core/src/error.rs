use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },

    #[error("matrix is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("imaginary part is not positive definite (smallest eigenvalue {smallest_eigenvalue:e})")]
    NotPositiveDefinite { smallest_eigenvalue: f64 },

    #[error("precision exhausted: |det(CZ+D)| = {det_abs:e} at {precision} bits")]
    Precision { det_abs: f64, precision: u32 },

    #[error("genus {0} is not supported here")]
    UnsupportedGenus(usize),

    #[error("step budget of {budget} exceeded: {diagnostics}")]
    BudgetExceeded { budget: usize, diagnostics: String },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    BadDiscriminant(i64),

    #[error("form ({a}, {b}, {c}) is not reduced")]
    NotReduced { a: i64, b: i64, c: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
