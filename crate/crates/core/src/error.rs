use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("no flow-carrying path")]
    EmptyFlow,

    #[error("not a feasible expanded flow: {0}")]
    InfeasibleExpandedFlow(String),

    #[error("flow total {total} is below the requested rate {rate}")]
    InsufficientRate { total: String, rate: String },

    #[error("integer solver requires an integer rate, got {0}")]
    NonIntegerRate(String),

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("instance is infeasible: {0}")]
    Infeasible(String),

    #[error("invalid generator input: {0}")]
    Generator(String),

    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
