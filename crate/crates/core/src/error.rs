use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {x} lies within {dist:e} of a lattice point")]
    SingularArgument { x: Complex64, dist: f64 },
    #[error("derivative order {0} is out of range")]
    InvalidOrder(usize),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("step size {h:e} underflowed at t = {t}")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("invalid integrator setting: {0}")]
    InvalidTolerance(String),
    #[error("epsilon {eps:e} is below the admissible minimum {min:e}")]
    EpsilonTooSmall { eps: f64, min: f64 },
    #[error("pairs {0} and {1} collide after embedding")]
    CrossPairCollision(usize, usize),
    #[error("odd particle count {0} cannot be split into pairs")]
    OddParticleCount(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("extrapolation did not converge (order estimate {order:.3})")]
    NoConvergence { order: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
