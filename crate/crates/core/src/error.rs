use thiserror::Error;

/// Errors produced by the library.
///
/// Payloads are stored as `f64` regardless of the scalar type so the error
/// stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("vortex strength {index} is zero")]
    ZeroStrength { index: usize },
    #[error("collision configuration: minimum squared separation {min_sq_separation:e}")]
    CollisionConfiguration { min_sq_separation: f64 },
    #[error("step size underflow at t = {t} (h = {step:e})")]
    StepFailure { t: f64, step: f64 },
    #[error("strengths do not admit real Pauli symbols (G1 G2 G3 / Gtot = {ratio})")]
    NotAdmissible { ratio: f64 },
    #[error("bad family parameter: {0}")]
    BadParameter(String),
    #[error("could not construct a basis of the plane S_Gamma")]
    DegenerateSubspace,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("G1 + G2 = 0: partial center of vorticity undefined")]
    DegenerateMass,
    #[error("Jacobi vector {0} vanishes; its angle is undefined")]
    ZeroVector(&'static str),
    #[error("coefficient {name} = {value} must be positive")]
    NegativeCoefficient { name: &'static str, value: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("evaluation point is at a coordinate singularity: {0}")]
    SingularPoint(&'static str),
    #[error("point of the shape sphere is a collision (b{index} = {value:e})")]
    CollisionPoint { index: usize, value: f64 },
    #[error("trajectories cannot be compared: {0}")]
    MismatchedSetup(String),
    #[error("mu = 0 is the triple collision")]
    TripleCollision,
    #[error("chart is singular at the pole")]
    PoleSingularity,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// `true` for errors caused by invalid user input, `false` for numerical failures
    /// encountered while computing.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::StepFailure { .. } | Error::SingularMatrix | Error::DegenerateSubspace
        )
    }
}

pub type Result<V, E = Error> = std::result::Result<V, E>;
