use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::kind::{kinduction, mutual_induction};
use super::{EngineConfig, Lemma, LemmaMode, LemmaStatus, ProofResult};
use crate::ir::{Property, TransitionSystem};

/// Result for one lemma or target, with the proven lemmas it could assume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub result: ProofResult,
    pub time_ms: u64,
    pub lemma_names_used: Vec<String>,
}

/// One line of the JSON-lines report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub name: String,
    pub status: String,
    /// Induction depth for proven and unknown_cti results.
    pub k: Option<u32>,
    /// Index of the violating frame for falsified results, the explored
    /// bound for unknown_bound.
    pub depth: Option<u32>,
    pub time_ms: u64,
    pub lemma_names_used: Vec<String>,
}

impl From<&PropertyReport> for ReportRecord {
    fn from(r: &PropertyReport) -> Self {
        let (k, depth) = match &r.result {
            ProofResult::Proven { k } => (Some(*k), None),
            ProofResult::UnknownCti { k, .. } => (Some(*k), None),
            ProofResult::Falsified { trace } => (None, Some(trace.violated_frame as u32)),
            ProofResult::UnknownBound { depth } => (None, Some(*depth)),
            ProofResult::UnknownResource => (None, None),
        };
        ReportRecord {
            name: r.name.clone(),
            status: r.result.status_name().to_string(),
            k,
            depth,
            time_ms: r.time_ms,
            lemma_names_used: r.lemma_names_used.clone(),
        }
    }
}

impl ReportRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProveAllReport {
    /// Candidate lemmas first, then targets, in input order.
    pub results: Vec<PropertyReport>,
    /// The input lemmas with updated status.
    pub lemmas: Vec<Lemma>,
}

impl ProveAllReport {
    pub fn get(&self, name: &str) -> Option<&ProofResult> {
        self.results.iter().find(|r| r.name == name).map(|r| &r.result)
    }

    pub fn records(&self) -> Vec<ReportRecord> {
        self.results.iter().map(ReportRecord::from).collect()
    }
}

fn proven_names(lemmas: &[Lemma]) -> Vec<String> {
    lemmas.iter().filter(|l| l.is_proven()).map(|l| l.name.clone()).collect()
}

fn reject_reason(r: &ProofResult) -> String {
    match r {
        ProofResult::Falsified { trace } => format!("falsified at frame {}", trace.violated_frame),
        ProofResult::UnknownCti { k, .. } => format!("not inductive up to k={k}"),
        ProofResult::UnknownBound { depth } => format!("unknown within depth {depth}"),
        ProofResult::UnknownResource => "solver budget exhausted".into(),
        ProofResult::Proven { .. } => unreachable!(),
    }
}

fn timed(f: impl FnOnce() -> ProofResult) -> (ProofResult, u64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_millis() as u64)
}

/// Proves candidate lemmas and then targets.
///
/// Lemmas already `Proven` are assumed throughout. `Candidate` lemmas are
/// proved first and, once proven, assumed for everything after them.
pub fn prove_all(ts: &TransitionSystem, targets: &[Property], lemmas: &[Lemma], cfg: &EngineConfig) -> ProveAllReport {
    match cfg.lemma_mode {
        LemmaMode::Sequential => sequential(ts, targets, lemmas, cfg),
        LemmaMode::Simultaneous => simultaneous(ts, targets, lemmas, cfg),
    }
}

fn sequential(ts: &TransitionSystem, targets: &[Property], lemmas: &[Lemma], cfg: &EngineConfig) -> ProveAllReport {
    let mut store: Vec<Lemma> = lemmas.iter().filter(|l| l.is_proven()).cloned().collect();
    let mut results = Vec::new();
    let mut updated = Vec::new();
    for lemma in lemmas {
        if lemma.is_proven() || matches!(lemma.status, LemmaStatus::Rejected { .. }) {
            updated.push(lemma.clone());
            continue;
        }
        let used = proven_names(&store);
        let (result, time_ms) = timed(|| kinduction(ts, &lemma.as_property(), &store, cfg));
        let mut l = lemma.clone();
        l.status = match &result {
            ProofResult::Proven { k } => LemmaStatus::Proven { k: *k },
            other => LemmaStatus::Rejected { reason: reject_reason(other) },
        };
        if l.is_proven() {
            store.push(l.clone());
        }
        updated.push(l);
        results.push(PropertyReport {
            name: lemma.name.clone(),
            result,
            time_ms,
            lemma_names_used: used,
        });
    }
    let used = proven_names(&store);
    let run = |p: &Property| {
        let (result, time_ms) = timed(|| kinduction(ts, p, &store, cfg));
        PropertyReport {
            name: p.name.clone(),
            result,
            time_ms,
            lemma_names_used: used.clone(),
        }
    };
    let target_results: Vec<PropertyReport> = if cfg.jobs > 1 && targets.len() > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| targets.par_iter().map(run).collect())
    } else {
        targets.iter().map(run).collect()
    };
    results.extend(target_results);
    ProveAllReport { results, lemmas: updated }
}

fn simultaneous(ts: &TransitionSystem, targets: &[Property], lemmas: &[Lemma], cfg: &EngineConfig) -> ProveAllReport {
    let mut store: Vec<Lemma> = lemmas.iter().filter(|l| l.is_proven()).cloned().collect();
    let candidates: Vec<&Lemma> = lemmas
        .iter()
        .filter(|l| matches!(l.status, LemmaStatus::Candidate))
        .collect();
    let mut members: Vec<Property> = candidates.iter().map(|l| l.as_property()).collect();
    members.extend(targets.iter().cloned());
    let mut outcome: Vec<Option<ProofResult>> = vec![None; members.len()];
    let mut times = vec![0u64; members.len()];
    let assumed_at_start = proven_names(&store);

    for k in 1..=cfg.max_k {
        let open: Vec<usize> = (0..members.len()).filter(|&i| outcome[i].is_none()).collect();
        if open.is_empty() {
            break;
        }
        let subset: Vec<Property> = open.iter().map(|&i| members[i].clone()).collect();
        let start = Instant::now();
        let res = mutual_induction(ts, &subset, &store, k, cfg);
        let elapsed = start.elapsed().as_millis() as u64;
        for &i in &open {
            times[i] += elapsed;
        }
        let Ok(res) = res else {
            for &i in &open {
                outcome[i] = Some(ProofResult::UnknownResource);
            }
            break;
        };
        for &j in &res.proven {
            let i = open[j];
            outcome[i] = Some(ProofResult::Proven { k });
            let mut l = Lemma::candidate(members[i].name.clone(), members[i].expr.clone(), super::LemmaOrigin::User);
            l.status = LemmaStatus::Proven { k };
            store.push(l);
        }
        for (j, r) in res.dropped {
            if r.is_falsified() {
                outcome[open[j]] = Some(r);
            }
        }
    }
    // individual retry with everything proven so far
    for i in 0..members.len() {
        if outcome[i].is_none() {
            let (r, t) = timed(|| kinduction(ts, &members[i], &store, cfg));
            times[i] += t;
            if let ProofResult::Proven { k } = r {
                let mut l = Lemma::candidate(members[i].name.clone(), members[i].expr.clone(), super::LemmaOrigin::User);
                l.status = LemmaStatus::Proven { k };
                store.push(l);
            }
            outcome[i] = Some(r);
        }
    }

    let mut updated = Vec::new();
    let mut ci = 0;
    for lemma in lemmas {
        let mut l = lemma.clone();
        if matches!(lemma.status, LemmaStatus::Candidate) {
            l.status = match outcome[ci].as_ref().unwrap() {
                ProofResult::Proven { k } => LemmaStatus::Proven { k: *k },
                other => LemmaStatus::Rejected { reason: reject_reason(other) },
            };
            ci += 1;
        }
        updated.push(l);
    }
    let results = members
        .iter()
        .zip(outcome)
        .zip(times)
        .map(|((p, r), time_ms)| PropertyReport {
            name: p.name.clone(),
            result: r.unwrap(),
            time_ms,
            lemma_names_used: assumed_at_start.clone(),
        })
        .collect();
    ProveAllReport { results, lemmas: updated }
}
