use super::unroll::Unroller;
use super::{gate, EngineConfig, Lemma, ProofResult};
use crate::cex::TraceKind;
use crate::ir::{eval, Property, TransitionSystem};
use crate::sat::SolveError;

fn unroller<'a>(ts: &'a TransitionSystem, lemmas: &[Lemma], init: bool, simple_path: bool, cfg: &EngineConfig) -> Unroller<'a> {
    let admitted = gate::filter(lemmas);
    Unroller::new(ts, init, simple_path, gate::constraints(ts, &admitted), cfg.conflict_budget)
}

/// True when the assumptions admit no initial frame at all, which would make
/// every property hold vacuously.
pub fn check_vacuity(ts: &TransitionSystem, cfg: &EngineConfig) -> Result<bool, SolveError> {
    if ts.assumptions.is_empty() {
        return Ok(false);
    }
    let mut u = unroller(ts, &[], true, false, cfg);
    u.extend_to(0);
    let vacuous = u.check(&[])?.is_none();
    if vacuous {
        log::warn!("assumptions of {} are unsatisfiable in the initial state; all proofs are vacuous", ts.name);
    }
    Ok(vacuous)
}

/// Searches for the shallowest violation of `prop` within `depth` cycles of an
/// initial state.
pub fn bmc(ts: &TransitionSystem, prop: &Property, depth: u32, lemmas: &[Lemma], cfg: &EngineConfig) -> ProofResult {
    let mut u = unroller(ts, lemmas, true, false, cfg);
    for d in 0..=depth {
        u.extend_to(d);
        let p = u.lit(&prop.expr, d);
        match u.check(&[!p]) {
            Err(_) => return ProofResult::UnknownResource,
            Ok(Some(m)) => {
                return ProofResult::Falsified {
                    trace: u.trace(&m, d as usize + 1, TraceKind::CexFromInit, &prop.name),
                }
            }
            Ok(None) => u.add_clause(&[p]),
        }
    }
    ProofResult::UnknownBound { depth }
}

/// k-induction for `k = 1..=max_k`, with proven lemmas assumed at every frame.
pub fn kinduction(ts: &TransitionSystem, prop: &Property, lemmas: &[Lemma], cfg: &EngineConfig) -> ProofResult {
    assert!(cfg.max_k >= 1, "max_k must be at least 1");
    let admitted = gate::filter(lemmas);
    let constraints = gate::constraints(ts, &admitted);
    let mut base = Unroller::new(ts, true, false, constraints.clone(), cfg.conflict_budget);
    let mut step = Unroller::new(ts, false, cfg.simple_path, constraints, cfg.conflict_budget);
    let mut last_cti = None;
    for k in 1..=cfg.max_k {
        base.extend_to(k - 1);
        let p = base.lit(&prop.expr, k - 1);
        match base.check(&[!p]) {
            Err(_) => return ProofResult::UnknownResource,
            Ok(Some(m)) => {
                return ProofResult::Falsified {
                    trace: base.trace(&m, k as usize, TraceKind::CexFromInit, &prop.name),
                }
            }
            Ok(None) => base.add_clause(&[p]),
        }

        step.extend_to(k);
        step.assert_at(&prop.expr, k - 1);
        let q = step.lit(&prop.expr, k);
        match step.check(&[!q]) {
            Err(_) => return ProofResult::UnknownResource,
            Ok(None) => {
                log::debug!("{} proven at k={k}", prop.name);
                return ProofResult::Proven { k };
            }
            Ok(Some(m)) => {
                log::debug!("{}: step fails at k={k}", prop.name);
                last_cti = Some(step.trace(&m, k as usize + 1, TraceKind::Cti, &prop.name));
            }
        }
    }
    ProofResult::UnknownCti {
        k: cfg.max_k,
        cti: last_cti.expect("max_k >= 1 produces a CTI"),
    }
}

/// Result of [`mutual_induction`]: indices into the member list.
#[derive(Debug, Clone, Default)]
pub struct MutualOutcome {
    /// Members whose conjunction is inductive at the given k and holds in
    /// the first k frames from init.
    pub proven: Vec<usize>,
    /// Removed members with the CTI or base counterexample that removed them.
    pub dropped: Vec<(usize, ProofResult)>,
}

/// Greatest subset of `members` that is mutually k-inductive.
///
/// The step check assumes every live member at frames `0..k` and asks for
/// any member to fail at frame k; members false in the model are removed
/// until the check is unsatisfiable. Survivors are then checked from init
/// over frames `0..k`, and the fixpoint is re-run if that removes any.
pub fn mutual_induction(
    ts: &TransitionSystem,
    members: &[Property],
    lemmas: &[Lemma],
    k: u32,
    cfg: &EngineConfig,
) -> Result<MutualOutcome, SolveError> {
    assert!(k >= 1);
    let admitted = gate::filter(lemmas);
    let constraints = gate::constraints(ts, &admitted);
    let mut alive: Vec<usize> = (0..members.len()).collect();
    let mut dropped = Vec::new();
    loop {
        while !alive.is_empty() {
            let mut u = Unroller::new(ts, false, cfg.simple_path, constraints.clone(), cfg.conflict_budget);
            u.extend_to(k);
            for t in 0..k {
                for &i in &alive {
                    u.assert_at(&members[i].expr, t);
                }
            }
            let violations: Vec<_> = alive.iter().map(|&i| !u.lit(&members[i].expr, k)).collect();
            u.add_clause(&violations);
            let Some(m) = u.check(&[])? else { break };
            let frames = k as usize + 1;
            let mut cti = u.trace(&m, frames, TraceKind::Cti, "");
            let last = cti.frames[frames - 1].clone();
            let (bad, good): (Vec<usize>, Vec<usize>) = alive.iter().partition(|&&i| eval(&members[i].expr, &last) == 0);
            debug_assert!(!bad.is_empty());
            for i in bad {
                cti.violated_property = members[i].name.clone();
                dropped.push((i, ProofResult::UnknownCti { k, cti: cti.clone() }));
            }
            alive = good;
        }

        let mut base = Unroller::new(ts, true, false, constraints.clone(), cfg.conflict_budget);
        base.extend_to(k - 1);
        let mut base_fail = Vec::new();
        'member: for &i in &alive {
            for t in 0..k {
                let p = base.lit(&members[i].expr, t);
                if let Some(m) = base.check(&[!p])? {
                    let trace = base.trace(&m, t as usize + 1, TraceKind::CexFromInit, &members[i].name);
                    base_fail.push((i, ProofResult::Falsified { trace }));
                    continue 'member;
                }
            }
        }
        if base_fail.is_empty() {
            break;
        }
        alive.retain(|i| !base_fail.iter().any(|(j, _)| j == i));
        dropped.extend(base_fail);
    }
    Ok(MutualOutcome { proven: alive, dropped })
}
