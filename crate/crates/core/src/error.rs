use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division leaves a nonzero remainder")]
    NotDivisible,
    #[error("malformed middle factor: {0}")]
    Malformed(String),
    #[error("middle factor fails validation: {0}")]
    Invalid(String),
    #[error("middle factor is not in special form ({0})")]
    NotSpecialForm(String),
    #[error("expected a 2x2 middle factor, got {0} rows")]
    NotTwoByTwo(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("profile {profile} unsatisfiable after {attempts} attempts: {detail}")]
    Unsatisfiable { profile: String, attempts: usize, detail: String },
    #[error("document error: {0}")]
    Document(String),
}
