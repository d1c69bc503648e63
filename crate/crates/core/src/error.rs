// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

use crate::quad::QuadFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid decay rate gamma = {0}; must be finite and > 0")]
    InvalidRate(f64),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid qubit state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trial state is not normalized on the grid (norm = {norm})")]
    Unnormalized { norm: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(QuadFailure),

    #[error("quadrature did not converge at t = {time}: {failure}")]
    QuadratureAt { time: f64, failure: QuadFailure },

    #[error("semigroup propagation requires t >= 0 (got {0})")]
    NegativeTime(f64),

    #[error("potential is negative: V({x}) = {value}")]
    NegativePotential { x: f64, value: f64 },

    #[error("potential is not monotone: V({x0}) = {v0} but V({x1}) = {v1}")]
    NonMonotone { x0: f64, v0: f64, x1: f64, v1: f64 },

    #[error("W(x) = V(x) - V(-x) does not reach {target} after {doublings} bracket doublings")]
    RangeFailure { target: f64, doublings: usize },

    #[error("W'(x) vanishes at x = {x}")]
    SingularJacobian { x: f64 },

    #[error("amplitude vanishes at t = {0}; -ln|a| is singular there")]
    LogSingularity(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl From<QuadFailure> for Error {
    fn from(f: QuadFailure) -> Self {
        Error::Quadrature(f)
    }
}

impl Error {
    /// Attach the sample time to a quadrature failure.
    pub fn at_time(self, time: f64) -> Self {
        match self {
            Error::Quadrature(failure) => Error::QuadratureAt { time, failure },
            other => other,
        }
    }

    /// Best estimate carried by a quadrature failure, if any.
    pub fn best_estimate(&self) -> Option<num_complex::Complex64> {
        match self {
            Error::Quadrature(f) | Error::QuadratureAt { failure: f, .. } => Some(f.estimate),
            _ => None,
        }
    }
}
