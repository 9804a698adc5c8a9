use super::CandidateInvariant;
use crate::engine::{kinduction, mutual_induction, EngineConfig, Lemma, LemmaMode, LemmaStatus, ProofResult};
use crate::ir::{Property, TransitionSystem};

/// A candidate that failed its proof, with the result that sank it.
#[derive(Debug, Clone)]
pub struct Rejected {
    pub candidate: CandidateInvariant,
    pub result: ProofResult,
}

#[derive(Debug, Clone, Default)]
pub struct HoudiniResult {
    /// Proven lemmas, in candidate order.
    pub proven: Vec<Lemma>,
    pub rejected: Vec<Rejected>,
}

/// Largest subset of `candidates` that is conjunctively k-inductive and
/// holds in the first k frames, assuming the proven `lemmas`.
///
/// On solver budget exhaustion nothing is proven.
pub fn houdini(
    ts: &TransitionSystem,
    candidates: &[CandidateInvariant],
    k: u32,
    lemmas: &[Lemma],
    cfg: &EngineConfig,
) -> HoudiniResult {
    let members: Vec<Property> = candidates
        .iter()
        .map(|c| Property::new(c.name.clone(), c.expr.clone()))
        .collect();
    match mutual_induction(ts, &members, lemmas, k, cfg) {
        Ok(outcome) => {
            let proven = outcome
                .proven
                .iter()
                .map(|&i| {
                    let mut l = candidates[i].to_lemma();
                    l.status = LemmaStatus::Proven { k };
                    l
                })
                .collect();
            let rejected = outcome
                .dropped
                .into_iter()
                .map(|(i, result)| Rejected {
                    candidate: candidates[i].clone(),
                    result,
                })
                .collect();
            HoudiniResult { proven, rejected }
        }
        Err(e) => {
            log::warn!("houdini abandoned: {e}");
            HoudiniResult {
                proven: Vec::new(),
                rejected: candidates
                    .iter()
                    .map(|c| Rejected {
                        candidate: c.clone(),
                        result: ProofResult::UnknownResource,
                    })
                    .collect(),
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AdmitResult {
    pub admitted: Vec<Lemma>,
    pub rejected: Vec<Rejected>,
}

/// Tries to prove `candidates` with the proven `lemmas` assumed. Sequential
/// mode proves one candidate at a time, each admitted one joining the
/// assumptions; simultaneous mode runs Houdini for k = 1..=max_k.
pub fn admit(ts: &TransitionSystem, candidates: &[CandidateInvariant], lemmas: &[Lemma], cfg: &EngineConfig) -> AdmitResult {
    let mut store: Vec<Lemma> = lemmas.iter().filter(|l| l.is_proven()).cloned().collect();
    let mut result = AdmitResult::default();
    match cfg.lemma_mode {
        LemmaMode::Sequential => {
            for c in candidates {
                let prop = Property::new(c.name.clone(), c.expr.clone());
                match kinduction(ts, &prop, &store, cfg) {
                    ProofResult::Proven { k } => {
                        let mut l = c.to_lemma();
                        l.status = LemmaStatus::Proven { k };
                        store.push(l.clone());
                        result.admitted.push(l);
                    }
                    other => result.rejected.push(Rejected {
                        candidate: c.clone(),
                        result: other,
                    }),
                }
            }
        }
        LemmaMode::Simultaneous => {
            let mut open: Vec<CandidateInvariant> = candidates.to_vec();
            for k in 1..=cfg.max_k {
                if open.is_empty() {
                    break;
                }
                let h = houdini(ts, &open, k, &store, cfg);
                let proven_names: Vec<&str> = h.proven.iter().map(|l| l.name.as_str()).collect();
                let mut next_open = Vec::new();
                for r in h.rejected {
                    if r.result.is_falsified() || k == cfg.max_k || matches!(r.result, ProofResult::UnknownResource) {
                        result.rejected.push(r);
                    } else {
                        next_open.push(r.candidate);
                    }
                }
                open.retain(|c| !proven_names.contains(&c.name.as_str()));
                open.retain(|c| next_open.iter().any(|n| n.name == c.name));
                store.extend(h.proven.iter().cloned());
                result.admitted.extend(h.proven);
            }
        }
    }
    result
}
