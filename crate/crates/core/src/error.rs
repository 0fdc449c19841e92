use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("division by zero at the base point")]
    DivisionByZero,
    #[error("jet order too low: need {needed}, have {have}")]
    OrderTooLow { needed: usize, have: usize },
    #[error("base points differ")]
    BasePointMismatch,
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("F3 vanishes: the 3-jet is not in the generic orbit")]
    F3Zero,
    #[error("F1 and F2 both vanish: the 2-jet lies over the linearizable orbit")]
    LinearizableOrbit,
    #[error("degenerate A-space: {0}")]
    DegenerateASpace(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expression is nonlinear in the vector field unknowns")]
    Nonlinear,
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("{0}")]
    Input(String),
    #[error("non-regular point: {0}")]
    NonRegular(String),
    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
