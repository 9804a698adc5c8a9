use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dedup_candidates, CandidateInvariant, CandidateOrigin};
use crate::cex::Trace;
use crate::ir::{eval, mask, step, BinOp, Expr, Frame, Init, TransitionSystem};

fn template(name: String, expr: Expr, id: &str, priority: u8) -> CandidateInvariant {
    CandidateInvariant {
        name,
        expr,
        origin: CandidateOrigin::Template {
            id: id.to_string(),
            priority,
        },
        source_text: None,
    }
}

/// Enumerates template lemmas over the state variables, in this order:
/// pairwise equalities, per-bit constants, power-of-two upper bounds, and
/// nibble-slice equalities. Structural duplicates are removed.
pub fn gen_template_candidates(ts: &TransitionSystem) -> Vec<CandidateInvariant> {
    let states: Vec<_> = ts.state_ids().collect();
    let mut out = Vec::new();
    let same_width_pairs: Vec<_> = states
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| states[i + 1..].iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| ts.width_of(x) == ts.width_of(y))
        .collect();

    for &(x, y) in &same_width_pairs {
        out.push(template(
            format!("{}_eq_{}", ts.name_of(x), ts.name_of(y)),
            Expr::eq(ts.var_expr(x), ts.var_expr(y)),
            "eq",
            0,
        ));
    }
    for &x in &states {
        for i in 0..ts.width_of(x) {
            for v in 0..2 {
                out.push(template(
                    format!("{}_b{i}_is_{v}", ts.name_of(x)),
                    Expr::eq(ts.var_expr(x).bit(i), Expr::constant(v, 1)),
                    "bit",
                    3,
                ));
            }
        }
    }
    for &x in &states {
        let w = ts.width_of(x);
        for j in 0..w {
            out.push(template(
                format!("{}_lt_{}", ts.name_of(x), 1u64 << j),
                Expr::binop(BinOp::Ult, ts.var_expr(x), Expr::constant(1 << j, w)),
                "bound",
                1,
            ));
        }
    }
    for &(x, y) in &same_width_pairs {
        let w = ts.width_of(x);
        for lo in (0..w).step_by(4) {
            let hi = (lo + 3).min(w - 1);
            out.push(template(
                format!("{}_{hi}_{lo}_eq_{}", ts.name_of(x), ts.name_of(y)),
                Expr::eq(ts.var_expr(x).slice(hi, lo), ts.var_expr(y).slice(hi, lo)),
                "slice",
                2,
            ));
        }
    }
    dedup_candidates(out)
}

/// Keeps the candidates that hold in every frame of `seeds` random runs of
/// `steps` cycles. Nondeterministic initial values and inputs are drawn
/// from a generator seeded with `seed + run`.
pub fn simulate_filter(
    ts: &TransitionSystem,
    candidates: Vec<CandidateInvariant>,
    seeds: u64,
    steps: usize,
    seed: u64,
) -> Vec<CandidateInvariant> {
    let mut alive = vec![true; candidates.len()];
    for run in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run));
        let mut state = Frame::default();
        for s in &ts.states {
            let v = match s.init {
                Init::Const(k) => k,
                Init::Nondet => rng.random::<u64>() & mask(ts.width_of(s.id)),
            };
            state.set(s.id, v);
        }
        for _ in 0..=steps {
            // resample inputs until the assumptions hold; give up on a dead end
            let frame = (0..64).find_map(|_| {
                let mut f = state.clone();
                for &i in &ts.inputs {
                    f.set(i, rng.random::<u64>() & mask(ts.width_of(i)));
                }
                ts.assumptions.iter().all(|a| eval(&a.expr, &f) == 1).then_some(f)
            });
            let Some(frame) = frame else { break };
            for (c, ok) in candidates.iter().zip(alive.iter_mut()) {
                if *ok && eval(&c.expr, &frame) == 0 {
                    *ok = false;
                }
            }
            state = step(ts, &frame);
        }
    }
    candidates
        .into_iter()
        .zip(alive)
        .filter_map(|(c, ok)| ok.then_some(c))
        .collect()
}

/// Candidates false at the first frame of `cti`: once proven they rule out
/// this CTI. Ranked by template priority, then size, then name.
pub fn cti_block_candidates(cti: &Trace, survivors: &[CandidateInvariant]) -> Vec<CandidateInvariant> {
    let start = &cti.frames[0];
    let mut out: Vec<CandidateInvariant> = survivors
        .iter()
        .filter(|c| eval(&c.expr, start) == 0)
        .cloned()
        .collect();
    out.sort_by(|a, b| {
        (a.priority(), a.expr.size(), &a.name).cmp(&(b.priority(), b.expr.size(), &b.name))
    });
    out
}
