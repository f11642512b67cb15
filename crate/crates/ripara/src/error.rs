use crate::C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("requested degree {requested} is below the polynomial degree {actual}")]
    InvalidDegree { requested: usize, actual: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("root finder did not converge in {iterations} iterations")]
    RootFindFailure { iterations: usize, best: Vec<C64> },
    #[error("moment z^{index} not available (table depth {depth})")]
    MomentDepthExceeded { index: i64, depth: usize },
    #[error("division by zeta = 0")]
    DivisionByZeta,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("tau_0 must be nonzero")]
    InvalidTau,
    #[error("omega_{0} vanishes")]
    OmegaBreakdown(usize),
    #[error("r_{0}(zeta) vanishes")]
    RBreakdown(usize),
    #[error("u_{0} and v_{0} vanish together")]
    DegenerateStep(usize),
    #[error("u_{0} vanishes; the u = 0 branch is required")]
    BranchRequired(usize),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("series coefficient {0} did not stabilize")]
    CorrespondenceFailure(i64),
    #[error("zero denominator at tail level {0}")]
    TailBreakdown(usize),
    #[error("leading minor breakdown at level {0}")]
    MinorBreakdown(usize),
    #[error("guard violated: {0}")]
    GuardViolation(String),
    #[error("1 - rho_hat*rho_tilde vanishes at level {0}")]
    LambdaCollapse(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("beta_{0} is not inside the unit disk")]
    InvalidBeta(usize),
    #[error("x = {0} is outside (-1, 1)")]
    OutOfDomain(f64),
    #[error("beta_{index} left the unit disk")]
    EscapedDisk { index: usize, partial: Vec<C64> },
    #[error("ambiguous magnitude at n = {n}, k = {k}")]
    IndeterminateOrthogonality { n: usize, k: usize },
    #[error("quadrature did not settle: grids disagree by {0:e}")]
    QuadratureWarning(f64),
}
