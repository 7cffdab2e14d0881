use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero (norm of divisor vanishes)")]
    DivisionByZero,

    #[error("pole at specialization: {0}")]
    PoleAtSpecialization(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("characteristic polynomial shape violation: {0}")]
    ShapeViolation(String),

    #[error("root polishing did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("degenerate scalar context: {0}")]
    DegenerateContext(String),

    #[error("numerical rank is ambiguous: singular value {sigma:e} lies in the band ({lo:e}, {hi:e})")]
    RankAmbiguous { sigma: f64, lo: f64, hi: f64 },

    #[error("matrix is not an isometry of the supplied form (residual {0:e})")]
    NotAnIsometry(f64),

    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("budget exhausted: reached rank {achieved} of 16 within word length {max_len}")]
    BudgetExhausted { achieved: usize, max_len: usize },

    #[error("no witness found within word length {0}")]
    NotFound(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
