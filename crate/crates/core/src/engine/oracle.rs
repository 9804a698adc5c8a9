use std::collections::{HashMap, VecDeque};

use crate::cex::{Trace, TraceKind};
use crate::ir::{eval, mask, step, Frame, Init, Property, TransitionSystem, VarId};

/// Largest state + input bit count the explicit checker accepts.
pub const DEFAULT_ORACLE_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Holds,
    /// A shortest trace from an initial state.
    Violated { trace: Trace },
    /// More than `max_states` states were reached.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{bits} state and input bits exceed the explicit-state limit of {limit}")]
    TooLarge { bits: u32, limit: u32 },
}

/// Packs and unpacks a list of variables into one integer.
struct Packing {
    fields: Vec<(VarId, u32, u32)>,
}

impl Packing {
    fn new(ts: &TransitionSystem, ids: impl Iterator<Item = VarId>) -> Self {
        let mut offset = 0;
        let fields = ids
            .map(|id| {
                let w = ts.width_of(id);
                let f = (id, offset, w);
                offset += w;
                f
            })
            .collect();
        Packing { fields }
    }

    fn bits(&self) -> u32 {
        self.fields.iter().map(|f| f.2).sum()
    }

    fn pack(&self, frame: &Frame) -> u64 {
        self.fields
            .iter()
            .map(|&(id, off, _)| frame.get(id).unwrap_or(0) << off)
            .sum()
    }

    fn unpack_into(&self, key: u64, frame: &mut Frame) {
        for &(id, off, w) in &self.fields {
            frame.set(id, key >> off & mask(w));
        }
    }
}

/// Explicit breadth-first reachability from every initial state under every
/// input valuation allowed by the assumptions.
pub fn bfs_oracle(ts: &TransitionSystem, prop: &Property, max_states: usize) -> Result<OracleResult, OracleError> {
    let bits = ts.state_bits() + ts.input_bits();
    if bits > DEFAULT_ORACLE_BITS {
        return Err(OracleError::TooLarge {
            bits,
            limit: DEFAULT_ORACLE_BITS,
        });
    }
    let states = Packing::new(ts, ts.state_ids());
    let inputs = Packing::new(ts, ts.inputs.iter().copied());

    // parent state and the input applied in it
    let mut parent: HashMap<u64, Option<(u64, u64)>> = HashMap::new();
    let mut queue = VecDeque::new();

    let nondet: Vec<&crate::ir::StateVar> = ts.states.iter().filter(|s| s.init == Init::Nondet).collect();
    let nondet_bits: u32 = nondet.iter().map(|s| ts.width_of(s.id)).sum();
    let free = Packing::new(ts, nondet.iter().map(|s| s.id));
    for choice in 0..1u64 << nondet_bits {
        let mut f = Frame::default();
        for s in &ts.states {
            if let Init::Const(k) = s.init {
                f.set(s.id, k);
            }
        }
        free.unpack_into(choice, &mut f);
        let key = states.pack(&f);
        if parent.insert(key, None).is_none() {
            queue.push_back(key);
        }
    }

    let frame_of = |s: u64, i: u64| {
        let mut f = Frame::default();
        inputs.unpack_into(i, &mut f);
        states.unpack_into(s, &mut f);
        f
    };

    while let Some(s) = queue.pop_front() {
        for i in 0..1u64 << inputs.bits() {
            let f = frame_of(s, i);
            if ts.assumptions.iter().any(|a| eval(&a.expr, &f) == 0) {
                continue;
            }
            if eval(&prop.expr, &f) == 0 {
                let mut frames = vec![f];
                let mut cur = s;
                while let Some(Some((p, pi))) = parent.get(&cur) {
                    frames.push(frame_of(*p, *pi));
                    cur = *p;
                }
                frames.reverse();
                return Ok(OracleResult::Violated {
                    trace: Trace::new(TraceKind::CexFromInit, prop.name.clone(), frames),
                });
            }
            let next = states.pack(&step(ts, &f));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((s, i)));
                queue.push_back(next);
                if parent.len() > max_states {
                    return Ok(OracleResult::Exhausted);
                }
            }
        }
    }
    Ok(OracleResult::Holds)
}
