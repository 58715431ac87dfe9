// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

use crate::template::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input arity mismatch: expected {expected} bits, got {actual}")]
    InputArity { expected: usize, actual: usize },

    #[error("interface mismatch: {0}")]
    Interface(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cyclic definition involving `{0}`")]
    Cyclic(String),

    #[error("undefined signal `{0}`")]
    Undefined(String),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{what} is {actual}, above the limit of {limit}")]
    ResourceGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("parameter shape error: {0}")]
    ParameterShape(String),

    #[error("expected {expected:?}-family parameters, found {actual:?}")]
    FamilyMismatch { expected: Family, actual: Family },

    #[error("infeasible bounds: {0}")]
    InfeasibleBounds(String),

    #[error("solver executable `{}` could not be started: {source}", path.display())]
    SolverMissing {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("solver protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
