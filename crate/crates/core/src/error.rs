//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the numeric kernels and the reduction pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular ({0})")]
    Singular(String),
    #[error("matrix too ill-conditioned to solve (estimated condition {cond:.3e})")]
    IllConditioned { cond: f64 },
    #[error("eigenvalue iteration failed to converge ({0})")]
    NonDiagonalizable(String),
    #[error("matrix exponential overflow (norm {norm:.3e})")]
    Overflow { norm: f64 },
    #[error("singular pencil: coefficient {value:.3e} at ({i}, {j}) is numerically zero")]
    SingularPencil { i: usize, j: usize, value: f64 },
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("gramian condition {cond:.3e} exceeds 1e12; use lightly damped shifts with light-mode factors")]
    GramianIllConditioned { cond: f64 },
    #[error("pair is not observable ({0})")]
    NotObservable(String),
    #[error("pair is not controllable ({0})")]
    NotControllable(String),
    #[error("evaluation point {point} is a pole of the system")]
    PointIsPole { point: num_complex::Complex64 },
    #[error("domain mismatch: expected {expected}, got {got}")]
    DomainMismatch { expected: String, got: String },
    #[error("system is unstable ({0})")]
    Unstable(String),
    #[error("rank deficient: requested order {requested}, numerical rank {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("invalid range: {0}")]
    BadRange(String),
    #[error("quadrature node at a singularity of the map (node {0})")]
    NodeAtSingularity(f64),
    #[error("invalid damping coefficient: {0}")]
    BadDamping(String),
    #[error("invalid shift: {0}")]
    BadShift(String),
    #[error("derivative sample required at point {point}")]
    MissingDerivative { point: num_complex::Complex64 },
    #[error("sample missing at point {point}")]
    MissingSample { point: num_complex::Complex64 },
    #[error("too few samples: need {need}, have {have}")]
    TooFewSamples { need: usize, have: usize },
    #[error("point set is not closed under conjugation (point {point})")]
    NotConjugateClosed { point: num_complex::Complex64 },
    #[error("regressor matrix is rank deficient (rank {rank} < {need})")]
    RankDeficientRegressor { rank: usize, need: usize },
    #[error("signal generator pair is not observable")]
    UnobservableGenerator,
    #[error("quadrature grid does not match quadruplet provenance ({0})")]
    GridMismatch(String),
    #[error("requested order {requested} exceeds numerical rank {rank}")]
    RankTooLow { requested: usize, rank: usize },
    #[error("interpolation point {point} hits a surrogate pole")]
    SurrogatePoleHit { point: num_complex::Complex64 },
    #[error("interpolation point {point} lies on the imaginary axis")]
    ShiftOnAxis { point: num_complex::Complex64 },
    #[error("interpolation point {point} lies on the unit circle")]
    ShiftOnCircle { point: num_complex::Complex64 },
    #[error("reduced E matrix is numerically singular at iteration {iteration}")]
    SingularReducedE { iteration: usize },
    #[error("file format error at line {line}: {message}")]
    FileFormat { line: usize, message: String },
    #[error("empty report: nothing to emit")]
    EmptyReport,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
