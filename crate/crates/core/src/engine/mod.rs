//! Bounded model checking, k-induction with helper lemmas, property
//! orchestration, and an explicit-state reference checker.

pub mod gate;
mod kind;
mod oracle;
mod prove;
mod unroll;

use serde::{Deserialize, Serialize};

use crate::cex::Trace;
use crate::ir::{Expr, Property};

pub use kind::{bmc, check_vacuity, kinduction, mutual_induction, MutualOutcome};
pub use oracle::{bfs_oracle, OracleError, OracleResult, DEFAULT_ORACLE_BITS};
pub use prove::{prove_all, PropertyReport, ProveAllReport, ReportRecord};

/// Outcome of checking one property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProofResult {
    Proven { k: u32 },
    Falsified { trace: Trace },
    UnknownCti { k: u32, cti: Trace },
    UnknownBound { depth: u32 },
    UnknownResource,
}

impl ProofResult {
    pub fn status_name(&self) -> &'static str {
        match self {
            ProofResult::Proven { .. } => "proven",
            ProofResult::Falsified { .. } => "falsified",
            ProofResult::UnknownCti { .. } => "unknown_cti",
            ProofResult::UnknownBound { .. } => "unknown_bound",
            ProofResult::UnknownResource => "unknown_resource",
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, ProofResult::Proven { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, ProofResult::Falsified { .. })
    }

    /// The falsifying trace or CTI, if any.
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            ProofResult::Falsified { trace } => Some(trace),
            ProofResult::UnknownCti { cti, .. } => Some(cti),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LemmaOrigin {
    User,
    Template { id: String },
    Llm { model: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LemmaStatus {
    Candidate,
    Proven { k: u32 },
    Rejected { reason: String },
}

/// A helper invariant. Only `Proven` lemmas are ever assumed by the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub name: String,
    pub expr: Expr,
    pub origin: LemmaOrigin,
    pub status: LemmaStatus,
}

impl Lemma {
    pub fn candidate(name: impl Into<String>, expr: Expr, origin: LemmaOrigin) -> Lemma {
        assert_eq!(expr.width(), 1, "lemmas are width-1");
        Lemma {
            name: name.into(),
            expr,
            origin,
            status: LemmaStatus::Candidate,
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self.status, LemmaStatus::Proven { .. })
    }

    pub fn as_property(&self) -> Property {
        Property::new(self.name.clone(), self.expr.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaMode {
    /// Prove lemmas one at a time in order, assuming earlier proven ones.
    Sequential,
    /// Prove lemmas and targets together by mutual induction.
    Simultaneous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_k: u32,
    pub bmc_depth: u32,
    pub simple_path: bool,
    /// Conflicts allowed per solver call; `None` is unlimited.
    pub conflict_budget: Option<u64>,
    pub lemma_mode: LemmaMode,
    /// Worker threads for independent targets.
    pub jobs: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_k: 8,
            bmc_depth: 20,
            simple_path: false,
            conflict_budget: None,
            lemma_mode: LemmaMode::Sequential,
            jobs: 1,
        }
    }
}
