use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    NoConvergence {
        estimate: num_complex::Complex64,
        error_bound: f64,
    },
    #[error("step size underflow at parameter {0}")]
    StepUnderflow(f64),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("pole at puncture {0}")]
    Pole(usize),
    #[error("point {0} is a branch point")]
    BranchPoint(num_complex::Complex64),
    #[error("point lies on the loop")]
    PointOnPath,
    #[error("path crosses a branch cut: {0}")]
    CutCrossing(String),
    #[error("path cannot be decomposed in the homology basis: {0}")]
    Undecomposable(String),
    #[error("out of grid: r = {0}")]
    OutOfGrid(f64),
    #[error("shooting mismatch: {0}")]
    Shooting(String),
    #[error("reducible representation: {0}")]
    Reducible(String),
    #[error("eigenvalue collision: {0}")]
    EigenCollision(String),
    #[error("matrix is not of twist shape, residual {0:e}")]
    ShapeViolation(f64),
    #[error("degenerate case: {0}")]
    Degenerate(String),
    #[error("boundary tie: {0}")]
    BoundaryTie(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("multiple roots: {0}")]
    MultipleRoots(String),
    #[error("inequality margin violated: {0}")]
    MarginViolation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
