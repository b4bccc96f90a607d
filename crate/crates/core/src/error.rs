use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("mixed degrees: `{first}` has degree {first_degree} but `{second}` has degree {second_degree}")]
    MixedDegree {
        first: String,
        first_degree: u32,
        second: String,
        second_degree: u32,
    },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point {point:?} lies outside the domain cone")]
    Domain { point: Vec<f64> },

    #[error("h = {value} is not positive at {point:?}")]
    NonPositive { point: Vec<f64>, value: f64 },

    #[error("gradient vanishes at {point:?} (norm {norm:e})")]
    DegenerateGradient { point: Vec<f64>, norm: f64 },

    #[error("basis is rank deficient at tolerance {tol:e}")]
    RankDeficient { tol: f64 },

    #[error("frame matrix is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("metric formulas disagree by {discrepancy:e} (relative)")]
    Inconsistent { discrepancy: f64 },

    #[error("form is not Lorentzian: eigenvalues {eigenvalues:?}")]
    NotLorentzian { eigenvalues: Vec<f64> },

    #[error("positive set is unbounded along {direction:?} from {base:?}; the component is not closed")]
    ClosednessFailure { base: Vec<f64>, direction: Vec<f64> },

    #[error("step size underflow at arclength {arclength}")]
    StepUnderflow { arclength: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error:e}")]
    QuadratureDiverged { estimate: f64, error: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
