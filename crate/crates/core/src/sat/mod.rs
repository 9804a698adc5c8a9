//! Bit-blasting to CNF and an embedded CDCL solver.

mod blast;
mod cnf;
mod external;
mod solver;

pub use blast::BlastContext;
pub use cnf::{Assignment, ClauseSink, CnfFormula, FormatError, Lit};
pub use external::{parse_output, ExternalError, ExternalSolver};
pub use solver::{solve, SolveError, SolveResult, Solver, SolverStats};
