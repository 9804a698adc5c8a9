//! Candidate helper lemmas from templates or a language model, and the proof
//! step that admits them.

mod extract;
mod houdini;
mod llm;
mod prompt;
mod templates;

use serde::{Deserialize, Serialize};

use crate::engine::{Lemma, LemmaOrigin};
use crate::ir::{Expr, TransitionSystem};

pub use extract::{extract_assertions, Extraction, Reject, RejectReason};
pub use houdini::{admit, houdini, AdmitResult, HoudiniResult, Rejected};
pub use llm::{llm_request, LlmConfig, LlmError, DEFAULT_API_KEY_ENV};
pub use prompt::{build_prompt, Flow, Placeholder, PromptBundle, PromptError, PROMPT_CEX_FILE, PROMPT_SPEC_FILE};
pub use templates::{cti_block_candidates, gen_template_candidates, simulate_filter};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateOrigin {
    /// `priority` orders templates when ranking: lower first.
    Template { id: String, priority: u8 },
    Llm { model: String },
    User,
}

/// A proposed width-1 invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateInvariant {
    pub name: String,
    pub expr: Expr,
    pub origin: CandidateOrigin,
    /// Statement text the candidate was parsed from, if any.
    pub source_text: Option<String>,
}

impl CandidateInvariant {
    pub fn priority(&self) -> u8 {
        match &self.origin {
            CandidateOrigin::Template { priority, .. } => *priority,
            CandidateOrigin::Llm { .. } | CandidateOrigin::User => 0,
        }
    }

    /// Assertion text in SVA-lite syntax.
    pub fn text(&self, ts: &TransitionSystem) -> String {
        ts.show(&self.expr)
    }

    pub fn to_lemma(&self) -> Lemma {
        let origin = match &self.origin {
            CandidateOrigin::Template { id, .. } => LemmaOrigin::Template { id: id.clone() },
            CandidateOrigin::Llm { model } => LemmaOrigin::Llm { model: model.clone() },
            CandidateOrigin::User => LemmaOrigin::User,
        };
        Lemma::candidate(self.name.clone(), self.expr.clone(), origin)
    }
}

/// Drops later candidates whose expression already occurred.
pub fn dedup_candidates(candidates: Vec<CandidateInvariant>) -> Vec<CandidateInvariant> {
    let mut seen = std::collections::HashSet::new();
    candidates.into_iter().filter(|c| seen.insert(c.expr.clone())).collect()
}
