// SPDX-License-Identifier: Apache-2.0

//! Solver-driven search over template parameters.
//!
//! [`encode_miter`] turns a [`MiterProblem`] into a quantifier-free SMT-LIB
//! script and [`solve`] runs it through an external solver, enumerating up to
//! the requested number of distinct models with blocking clauses. Every
//! decoded model is re-checked against the exhaustive oracle before it is
//! returned.

mod encode;
mod model;
mod session;

pub use encode::{blocking_clause, encode_miter, parameter_names, ENCODING_INPUT_CAP, ENCODING_OUTPUT_CAP};
pub use model::{decode_model, model_text};

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{table_soundness, ErrorSpec};
use crate::netlist::{truth_table_with, Circuit};
use crate::par::Exec;
use crate::template::{instantiate, ParameterAssignment, ProxyBounds, Template};
use crate::{Error, Result};

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "APXSYNTH_SOLVER";

/// One query: can `template` approximate `exact` within `spec` under `bounds`?
#[derive(Clone, Copy, Debug)]
pub struct MiterProblem<'a> {
    pub exact: &'a Circuit,
    pub template: &'a Template,
    pub spec: ErrorSpec,
    pub bounds: ProxyBounds,
    pub solutions: usize,
    pub timeout: Duration,
}

impl MiterProblem<'_> {
    pub fn check(&self) -> Result<()> {
        if self.template.inputs() != self.exact.input_count() || self.template.outputs() != self.exact.output_count() {
            return Err(Error::Interface(format!(
                "template is {}x{}, exact circuit {}x{}",
                self.template.inputs(),
                self.template.outputs(),
                self.exact.input_count(),
                self.exact.output_count()
            )));
        }
        if self.bounds.family != self.template.family() {
            return Err(Error::FamilyMismatch {
                expected: self.template.family(),
                actual: self.bounds.family,
            });
        }
        if self.solutions == 0 {
            return Err(Error::Config("at least one solution must be requested".into()));
        }
        Ok(())
    }

    /// File name used when dumping this problem.
    pub fn dump_name(&self) -> String {
        format!(
            "{}_{}_et{}_a{}_b{}.smt2",
            self.exact.name(),
            self.template.family(),
            self.spec.et,
            self.bounds.a,
            self.bounds.b
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverStatus {
    Sat,
    Unsat,
    Unknown,
    Timeout,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Sat => "SAT",
            SolverStatus::Unsat => "UNSAT",
            SolverStatus::Unknown => "UNKNOWN",
            SolverStatus::Timeout => "TIMEOUT",
        }
    }
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    /// Distinct assignments, non-empty exactly when `status` is `Sat`.
    pub models: Vec<ParameterAssignment>,
    pub wall_time: Duration,
}

/// How to reach the external solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: PathBuf,
    /// Command-line arguments; `None` picks defaults for known solvers.
    pub args: Option<Vec<String>>,
    /// When set, every solved script is written here.
    pub dump_dir: Option<PathBuf>,
}

impl SolverConfig {
    pub fn new(program: impl Into<PathBuf>) -> SolverConfig {
        SolverConfig {
            program: program.into(),
            args: None,
            dump_dir: None,
        }
    }

    /// `$APXSYNTH_SOLVER`, falling back to `z3` on the `PATH`.
    pub fn from_env() -> SolverConfig {
        SolverConfig::new(std::env::var_os(SOLVER_ENV).map_or_else(|| PathBuf::from("z3"), PathBuf::from))
    }

    pub fn with_dump_dir(mut self, dir: impl Into<PathBuf>) -> SolverConfig {
        self.dump_dir = Some(dir.into());
        self
    }

    pub(crate) fn effective_args(&self) -> Vec<String> {
        if let Some(args) = &self.args {
            return args.clone();
        }
        let stem = self
            .program
            .file_stem()
            .map(|s| s.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        let args: &[&str] = if stem.starts_with("z3") {
            &["-in"]
        } else if stem.starts_with("cvc5") || stem.starts_with("cvc4") {
            &["--lang=smt2", "--incremental"]
        } else if stem.starts_with("yices") {
            &["--incremental"]
        } else {
            &[]
        };
        args.iter().map(|s| s.to_string()).collect()
    }

    /// Checks that the solver starts and answers a trivial query.
    pub fn probe(&self) -> Result<()> {
        let mut session = session::Session::start(self)?;
        session.send("(set-logic QF_LIA)\n")?;
        match session.check_sat(Duration::from_secs(10))? {
            SolverStatus::Sat => Ok(()),
            other => Err(Error::Protocol(format!("trivial query answered {other}"))),
        }
    }
}

fn verify_model(
    problem: &MiterProblem<'_>,
    exact_table: &crate::netlist::TruthTable,
    params: &ParameterAssignment,
) -> Result<()> {
    problem.template.check(params)?;
    if !problem.bounds.admits(params) {
        return Err(Error::Protocol(format!(
            "solver model violates bounds ({}, {})",
            problem.bounds.a, problem.bounds.b
        )));
    }
    let circuit = instantiate(problem.template, params)?;
    let table = truth_table_with(&circuit, Exec::Sequential)?;
    let verdict = table_soundness(exact_table, &table, &problem.spec, Exec::Sequential);
    if !verdict.sound {
        return Err(Error::Protocol(format!(
            "solver model has worst-case error {} above {}",
            verdict.worst_case_error, problem.spec.et
        )));
    }
    Ok(())
}

/// Runs the solver on the encoded problem, collecting up to
/// `problem.solutions` distinct models.
///
/// The timeout applies to each `check-sat`; a timeout after some models were
/// found ends the enumeration with status `Sat`.
pub fn solve(problem: &MiterProblem<'_>, config: &SolverConfig) -> Result<SolverOutcome> {
    let text = encode_miter(problem)?;
    let exact_table = truth_table_with(problem.exact, Exec::Sequential)?;
    let start = Instant::now();
    let mut session = session::Session::start(config)?;
    session.send("(set-option :produce-models true)\n")?;
    session.send(&text)?;

    let mut models: Vec<ParameterAssignment> = Vec::new();
    let mut status;
    loop {
        status = session.check_sat(problem.timeout)?;
        if status != SolverStatus::Sat {
            break;
        }
        let model = session.get_model(problem.timeout)?;
        let params = decode_model(&model, problem.template)?;
        verify_model(problem, &exact_table, &params)?;
        if models.contains(&params) {
            return Err(Error::Protocol("solver repeated a blocked model".into()));
        }
        let block = blocking_clause(problem.template, &params);
        models.push(params);
        if models.len() >= problem.solutions {
            break;
        }
        session.send(&block)?;
    }
    if !models.is_empty() {
        status = SolverStatus::Sat;
    }
    if let Some(dir) = &config.dump_dir {
        dump(dir, &problem.dump_name(), &session.script)?;
    }
    drop(session);
    Ok(SolverOutcome {
        status,
        models,
        wall_time: start.elapsed(),
    })
}

fn dump(dir: &Path, name: &str, script: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), script)?;
    Ok(())
}
