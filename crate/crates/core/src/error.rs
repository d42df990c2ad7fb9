use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("transform is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },
    #[error("polynomial degenerates to a constant")]
    DegenerateResult,
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("matrix literal at byte {position} is not allowed inside the polynomial")]
    NonScalarCoefficient { position: usize },
    #[error("solution has eigenvalues matching no root of the polynomial: {0}")]
    InconsistentClassification(String),
    #[error("(b, c) = ({b}, {c}) lies outside the chart domain bc <= {bound}")]
    OutsideDomain { b: f64, c: f64, bound: f64 },
    #[error("scalar orbits are single points and have no tangent rank")]
    ScalarOrbit,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("an intermediate square root is a scalar matrix; analyze the expanded homogeneous equation instead")]
    ScalarCascade,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
