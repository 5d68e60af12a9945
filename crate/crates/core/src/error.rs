use thiserror::Error;

use crate::space::Element;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p must be finite and greater than 1, got {0}")]
    InvalidExponent(f64),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("elements live on different geometries")]
    GeometryMismatch,

    #[error("operation undefined for the zero element")]
    ZeroElement,

    #[error("{what} = {value} is outside the admissible domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("resolution limit: {0}")]
    ResolutionLimit(String),

    #[error("bound {name} = {value} is below the largest norm {max_norm}")]
    BoundBelowNorm {
        name: &'static str,
        value: f64,
        max_norm: f64,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient tail: {0}")]
    InsufficientTail(String),

    #[error(
        "Chebyshev solver did not converge after {iterations} iterations (best radius {radius})"
    )]
    NonConvergence {
        iterations: usize,
        radius: f64,
        best: Box<Element>,
    },

    #[error("energy budget exceeded: {lhs} > 1 + {tol_budget}")]
    EnergyBudgetExceeded { lhs: f64, tol_budget: f64 },

    #[error("profile norm {0} exceeds 2")]
    ProfileTooLarge(f64),

    #[error("input is not normalized: sup norm {0} > 1")]
    Unnormalized(f64),

    #[error("unknown example `{name}`; available: {}", available.join(", "))]
    UnknownExample {
        name: String,
        available: Vec<&'static str>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
