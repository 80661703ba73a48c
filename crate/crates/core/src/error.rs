use num_complex::Complex64;
use thiserror::Error;

use crate::funcexpr::{EvalError, ParseError};
use crate::pick::PsdVerdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    QuadratureNoConvergence { estimate: f64, target: f64 },

    #[error("profile tail does not decay like |y|^-{decay_hint}: {detail}")]
    TailBoundViolated { decay_hint: f64, detail: String },

    #[error("beta({at}) = {value} lies outside the half-plane Re s > -1/2")]
    BetaRange { at: Complex64, value: Complex64 },

    #[error("eigenvalue iteration failed to converge ({0})")]
    EigenFailure(String),

    #[error("exponent {0} is not an integer in 0..={1}")]
    ExponentOutOfRange(Complex64, usize),

    #[error("data is not interpolable: Pick matrix is not strictly positive (min eigenvalue {:e})", .0.min_eigenvalue)]
    NotInterpolable(Box<PsdVerdict>),

    #[error("interpolation nodes {0} and {1} coincide")]
    DegenerateNodes(usize, usize),

    #[error("unknown builtin operator `{0}` (expected hardy, volterra, mult_x or identity)")]
    UnknownBuiltin(String),

    #[error("Re(tau) = {0} < 0: no bounded flat operator exists for this shift (the power sequence fails the Pick feasibility test); route to pick-check")]
    ReTauNegative(f64),

    #[error("tabulated weight queried at {0}, which is not a tabulated node; interpolate the table first")]
    NotTabulated(Complex64),

    #[error("tabulated weight does not match interpolant at n = {n}: table {table}, interpolant {interp}")]
    InterpolantMismatch {
        n: usize,
        table: Complex64,
        interp: Complex64,
    },
}
