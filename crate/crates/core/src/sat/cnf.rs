use std::fmt::Write as _;
use std::ops::Not;

/// A literal in DIMACS convention: variable index ≥ 1 and a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        assert!(var >= 1, "variables are 1-based");
        Lit((var << 1) | (!positive) as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index (`2 * var + negated`) for per-literal tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn to_dimacs(self) -> i64 {
        if self.is_positive() {
            self.var() as i64
        } else {
            -(self.var() as i64)
        }
    }

    pub fn from_dimacs(v: i64) -> Lit {
        assert!(v != 0);
        Lit::new(v.unsigned_abs() as u32, v > 0)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl std::fmt::Display for Lit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Anything that can allocate variables and accept clauses.
pub trait ClauseSink {
    fn new_var(&mut self) -> Lit;
    fn add_clause(&mut self, clause: &[Lit]);
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(FormatError::new(lineno, "duplicate header"));
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                let parsed = match fields.as_slice() {
                    ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                    _ => None,
                };
                header = Some(parsed.ok_or_else(|| FormatError::new(lineno, "malformed `p cnf V C` header"))?);
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(FormatError::new(lineno, "clause before header"));
            };
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| FormatError::new(lineno, format!("malformed literal `{tok}`")))?;
                if v == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if v.unsigned_abs() > num_vars as u64 {
                    return Err(FormatError::new(lineno, format!("literal {v} exceeds {num_vars} variables")));
                } else {
                    current.push(Lit::from_dimacs(v));
                }
            }
        }
        let Some((num_vars, num_clauses)) = header else {
            return Err(FormatError::new(0, "missing `p cnf` header"));
        };
        if !current.is_empty() {
            return Err(FormatError::new(0, "last clause is not terminated by 0"));
        }
        if clauses.len() != num_clauses {
            return Err(FormatError::new(
                0,
                format!("header declares {num_clauses} clauses, found {}", clauses.len()),
            ));
        }
        Ok(CnfFormula { num_vars, clauses })
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars, true)
    }

    fn add_clause(&mut self, clause: &[Lit]) {
        debug_assert!(clause.iter().all(|l| l.var() <= self.num_vars));
        self.clauses.push(clause.to_vec());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("DIMACS line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// A (possibly partial) truth assignment, indexed by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(num_vars: u32) -> Self {
        Assignment {
            values: vec![None; num_vars as usize + 1],
        }
    }

    pub fn set(&mut self, var: u32, value: bool) {
        if var as usize >= self.values.len() {
            self.values.resize(var as usize + 1, None);
        }
        self.values[var as usize] = Some(value);
    }

    pub fn var_value(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.var_value(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len().saturating_sub(1) as u32
    }

    /// Independent clause-by-clause check: every clause has a true literal.
    pub fn satisfies(&self, cnf: &CnfFormula) -> bool {
        cnf.clauses
            .iter()
            .all(|c| c.iter().any(|&l| self.lit_value(l) == Some(true)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_writer() {
        let cnf = CnfFormula {
            num_vars: 1,
            clauses: vec![vec![Lit::new(1, true)]],
        };
        assert_eq!(cnf.to_dimacs(), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn dimacs_reader() {
        let cnf = CnfFormula::from_dimacs("p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(cnf.num_vars, 2);
        assert_eq!(cnf.clauses, vec![vec![Lit::new(1, true), Lit::new(2, false)]]);
        let multi = CnfFormula::from_dimacs("c comment\np cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(multi.clauses.len(), 2);
    }

    #[test]
    fn dimacs_errors() {
        for bad in [
            "p cnf x 1\n1 0\n",
            "1 0\n",
            "p cnf 1 1\n2 0\n",
            "p cnf 1 1\n1 a 0\n",
            "p cnf 1 2\n1 0\n",
            "p cnf 1 1\n1\n",
        ] {
            assert!(CnfFormula::from_dimacs(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn lit_encoding() {
        let l = Lit::from_dimacs(-7);
        assert_eq!(l.var(), 7);
        assert!(!l.is_positive());
        assert_eq!((!l).to_dimacs(), 7);
    }
}
