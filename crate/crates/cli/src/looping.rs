//! The prove, diagnose, suggest, admit cycle.

use std::io::{BufRead, Write};

use anyhow::Result;
use lemmaforge::cex::{render_ascii, RenderOptions};
use lemmaforge::engine::{prove_all, Lemma, LemmaOrigin, LemmaStatus, ProofResult, ReportRecord};
use lemmaforge::ir::{Expr, Property};
use lemmaforge::suggest::{
    admit, build_prompt, cti_block_candidates, extract_assertions, gen_template_candidates, llm_request,
    simulate_filter, CandidateInvariant, Flow, Reject,
};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Suggester};
use crate::review::review_gate;
use crate::session::{Artifacts, Session};

/// Random runs and cycles per run used to weed out template candidates.
const SIM_RUNS: u64 = 8;
const SIM_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalStatus {
    AllProven,
    Falsified,
    Exhausted,
}

impl FinalStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            FinalStatus::AllProven => 0,
            FinalStatus::Falsified => 1,
            FinalStatus::Exhausted => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub name: String,
    pub text: String,
    pub origin: String,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    pub name: String,
    pub text: String,
    pub status: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    /// Results for lemmas and targets at the start of the iteration.
    pub properties: Vec<ReportRecord>,
    pub cti_rendered: Option<String>,
    /// Text of every candidate sent to the prover.
    pub candidates_tried: Vec<String>,
    pub lemmas_admitted: Vec<LemmaRecord>,
    pub candidates_rejected: Vec<RejectedCandidate>,
    /// Model output that did not parse into a candidate.
    pub llm_rejects: Vec<Reject>,
    pub llm_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopReport {
    pub iterations: Vec<Iteration>,
    pub final_status: FinalStatus,
}

fn origin_name(origin: &LemmaOrigin) -> String {
    match origin {
        LemmaOrigin::User => "user".into(),
        LemmaOrigin::Template { id } => format!("template:{id}"),
        LemmaOrigin::Llm { model } => format!("llm:{model}"),
    }
}

fn known(store: &[Lemma], tried: &[Expr], e: &Expr) -> bool {
    store.iter().any(|l| &l.expr == e) || tried.contains(e)
}

struct Suggestion {
    candidates: Vec<CandidateInvariant>,
    llm_rejects: Vec<Reject>,
    llm_error: Option<String>,
}

fn template_suggestions(
    session: &Session,
    cti: &lemmaforge::cex::Trace,
    store: &[Lemma],
    tried: &[Expr],
    cfg: &RunConfig,
) -> Vec<CandidateInvariant> {
    let survivors = simulate_filter(&session.ts, gen_template_candidates(&session.ts), SIM_RUNS, SIM_STEPS, 0);
    cti_block_candidates(cti, &survivors)
        .into_iter()
        .filter(|c| !known(store, tried, &c.expr))
        .take(cfg.max_candidates)
        .collect()
}

fn llm_suggestions<R: BufRead, W: Write>(
    session: &Session,
    render: &str,
    iter: usize,
    cfg: &RunConfig,
    input: &mut R,
    output: &mut W,
) -> Suggestion {
    let mut s = Suggestion {
        candidates: Vec::new(),
        llm_rejects: Vec::new(),
        llm_error: None,
    };
    let prompt = match build_prompt(Flow::B, &cfg.prompt_dir, &session.source, None, Some(render)) {
        Ok(p) => p,
        Err(e) => {
            s.llm_error = Some(e.to_string());
            return s;
        }
    };
    let raw = match llm_request(&cfg.llm, &prompt) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("language model request failed: {e}");
            s.llm_error = Some(e.to_string());
            return s;
        }
    };
    let mut ex = extract_assertions(&raw, &session.ts, &cfg.llm.model_id);
    for c in &mut ex.candidates {
        c.name = format!("it{iter}_{}", c.name);
    }
    s.llm_rejects = ex.rejects;
    s.candidates = review_gate(&session.ts, ex.candidates, cfg.review, input, output);
    s
}

/// Proves `candidates` and records the outcome; true if any was admitted.
fn attempt(
    session: &Session,
    cfg: &RunConfig,
    candidates: Vec<CandidateInvariant>,
    it: &mut Iteration,
    store: &mut Vec<Lemma>,
    tried: &mut Vec<Expr>,
) -> bool {
    let ts = &session.ts;
    tried.extend(candidates.iter().map(|c| c.expr.clone()));
    it.candidates_tried.extend(candidates.iter().map(|c| c.text(ts)));
    let result = admit(ts, &candidates, store, &cfg.engine);
    for l in &result.admitted {
        let LemmaStatus::Proven { k } = l.status else { unreachable!("admit returns proven lemmas") };
        it.lemmas_admitted.push(LemmaRecord {
            name: l.name.clone(),
            text: ts.show(&l.expr),
            origin: origin_name(&l.origin),
            k,
        });
    }
    for r in &result.rejected {
        it.candidates_rejected.push(RejectedCandidate {
            name: r.candidate.name.clone(),
            text: r.candidate.text(ts),
            status: r.result.status_name().to_string(),
        });
    }
    let any = !result.admitted.is_empty();
    store.extend(result.admitted);
    any
}

/// Runs up to `max_loop_iters` rounds of proving and lemma suggestion.
/// Progress goes to `output`, review questions read from `input`.
pub fn run_loop<R: BufRead, W: Write>(
    session: &Session,
    cfg: &RunConfig,
    artifacts: &Artifacts,
    input: &mut R,
    output: &mut W,
) -> Result<LoopReport> {
    let ts = &session.ts;
    let mut store: Vec<Lemma> = session.lemmas.clone();
    let mut tried: Vec<Expr> = Vec::new();
    let mut iterations = Vec::new();
    let mut final_status = FinalStatus::Exhausted;

    for iter in 1..=cfg.max_loop_iters {
        let report = prove_all(ts, &session.targets, &store, &cfg.engine);
        store = report.lemmas.clone();
        let mut it = Iteration {
            properties: report.records(),
            ..Iteration::default()
        };
        let target_results: Vec<(&Property, &ProofResult)> = session
            .targets
            .iter()
            .map(|p| (p, report.get(&p.name).expect("every target has a result")))
            .collect();
        artifacts.report("report.jsonl", &it.properties)?;
        for (p, r) in &target_results {
            if let Some(trace) = r.trace() {
                artifacts.trace(&format!("iter{iter}_"), ts, trace, Some(p))?;
            }
        }
        let summary: Vec<String> = target_results
            .iter()
            .map(|(p, r)| format!("{}={}", p.name, r.status_name()))
            .collect();
        writeln!(output, "iteration {iter}: {}", summary.join(" "))?;

        if target_results.iter().all(|(_, r)| r.is_proven()) {
            iterations.push(it);
            final_status = FinalStatus::AllProven;
            break;
        }
        if target_results.iter().any(|(_, r)| r.is_falsified()) {
            iterations.push(it);
            final_status = FinalStatus::Falsified;
            break;
        }
        let Some((prop, cti)) = target_results.iter().find_map(|(p, r)| match r {
            ProofResult::UnknownCti { cti, .. } => Some((*p, cti)),
            _ => None,
        }) else {
            // nothing to learn from without a CTI
            iterations.push(it);
            break;
        };
        let render = render_ascii(cti, ts, Some(prop), RenderOptions::default()).text;
        it.cti_rendered = Some(render.clone());

        let mut admitted_any = false;
        if matches!(cfg.suggester, Suggester::Templates | Suggester::Both) {
            let candidates = template_suggestions(session, cti, &store, &tried, cfg);
            admitted_any |= attempt(session, cfg, candidates, &mut it, &mut store, &mut tried);
        }
        if cfg.suggester == Suggester::Llm || (cfg.suggester == Suggester::Both && !admitted_any) {
            let s = llm_suggestions(session, &render, iter, cfg, input, output);
            it.llm_rejects = s.llm_rejects;
            it.llm_error = s.llm_error;
            let fresh: Vec<CandidateInvariant> =
                s.candidates.into_iter().filter(|c| !known(&store, &tried, &c.expr)).collect();
            admitted_any |= attempt(session, cfg, fresh, &mut it, &mut store, &mut tried);
        }
        for l in &it.lemmas_admitted {
            writeln!(output, "  admitted {} (k={}): {}", l.name, l.k, l.text)?;
        }
        iterations.push(it);
        if !admitted_any {
            writeln!(output, "  no new lemma could be proven")?;
            break;
        }
    }
    let report = LoopReport {
        iterations,
        final_status,
    };
    artifacts.write("loop_report.json", &serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lemmaforge::suggest::RejectReason;

    #[test]
    fn report_round_trips() {
        let report = LoopReport {
            iterations: vec![Iteration {
                properties: vec![ReportRecord {
                    name: "p".into(),
                    status: "unknown_cti".into(),
                    k: Some(2),
                    depth: None,
                    time_ms: 3,
                    lemma_names_used: vec![],
                }],
                cti_rendered: Some("frame | 0\n".into()),
                candidates_tried: vec!["a == b".into()],
                lemmas_admitted: vec![LemmaRecord {
                    name: "l".into(),
                    text: "a == b".into(),
                    origin: "template:eq".into(),
                    k: 1,
                }],
                candidates_rejected: vec![RejectedCandidate {
                    name: "r".into(),
                    text: "a == 0".into(),
                    status: "falsified".into(),
                }],
                llm_rejects: vec![Reject {
                    text: "x".into(),
                    reason: RejectReason::UnknownSymbol("x".into()),
                }],
                llm_error: Some("timeout".into()),
            }],
            final_status: FinalStatus::Exhausted,
        };
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: LoopReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(FinalStatus::AllProven.exit_code(), 0);
        assert_eq!(FinalStatus::Falsified.exit_code(), 1);
        assert_eq!(FinalStatus::Exhausted.exit_code(), 2);
    }
}
