use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `h·h` vanishes (to tolerance): the two bands coalesce at an exceptional point.
    #[error("degenerate eigensystem at k = ({kx}, {ky}): |E| = {abs_e:e}")]
    DegenerateEigensystem { kx: f64, ky: f64, abs_e: f64 },

    #[error("singular point at k = ({kx}, {ky}): {reason}")]
    SingularPoint { kx: f64, ky: f64, reason: String },

    /// A single plaquette link carries a phase larger than π/2.
    #[error("branch jump on plaquette link: |arg| = {phase}")]
    BranchJump { phase: f64 },

    #[error("adaptive quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}
