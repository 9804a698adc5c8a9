//! Optional backend that pipes DIMACS to an external solver binary.
//!
//! The command receives the path of a temporary DIMACS file as its last
//! argument and must print a competition-style result: an
//! `s SATISFIABLE` / `s UNSATISFIABLE` line and, for SAT, `v` lines.

use std::io::Write;
use std::process::Command;

use super::cnf::{Assignment, CnfFormula, Lit};
use super::solver::SolveResult;

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("external solver command is empty")]
    EmptyCommand,
    #[error("could not run external solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("external solver output: {0}")]
    BadOutput(String),
}

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    /// Program followed by its arguments.
    pub command: Vec<String>,
}

impl ExternalSolver {
    /// Splits a command line on whitespace.
    pub fn from_command_line(line: &str) -> Self {
        ExternalSolver {
            command: line.split_whitespace().map(str::to_string).collect(),
        }
    }

    pub fn solve(&self, cnf: &CnfFormula, assumptions: &[Lit]) -> Result<SolveResult, ExternalError> {
        let (program, args) = self.command.split_first().ok_or(ExternalError::EmptyCommand)?;
        let mut with_units = cnf.clone();
        for &a in assumptions {
            with_units.num_vars = with_units.num_vars.max(a.var());
            with_units.clauses.push(vec![a]);
        }
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        file.write_all(with_units.to_dimacs().as_bytes())?;
        file.flush()?;
        let output = Command::new(program).args(args).arg(file.path()).output()?;
        parse_output(&String::from_utf8_lossy(&output.stdout), with_units.num_vars)
    }
}

/// Parses `s` and `v` lines of a solver's standard output.
pub fn parse_output(text: &str, num_vars: u32) -> Result<SolveResult, ExternalError> {
    let mut status = None;
    let mut model = Assignment::new(num_vars);
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(match s.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => false,
                other => return Err(ExternalError::BadOutput(format!("unknown status `{other}`"))),
            });
        } else if let Some(v) = line.strip_prefix("v ").or_else(|| (line == "v").then_some("")) {
            for tok in v.split_whitespace() {
                let n: i64 = tok
                    .parse()
                    .map_err(|_| ExternalError::BadOutput(format!("bad model literal `{tok}`")))?;
                if n != 0 {
                    let l = Lit::from_dimacs(n);
                    model.set(l.var(), l.is_positive());
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(model)),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(ExternalError::BadOutput("no `s` line".into())),
    }
}
