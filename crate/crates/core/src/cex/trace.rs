use serde::{Deserialize, Serialize};

use crate::ir::{Frame, TransitionSystem, VarId};
use crate::sat::{Assignment, BlastContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    /// Starts in an initial state: a real counterexample.
    CexFromInit,
    /// Inductive-step failure; frame 0 need not be reachable.
    Cti,
}

/// A sequence of frames ending in a property violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub kind: TraceKind,
    pub violated_property: String,
    pub violated_frame: usize,
    /// State and input values per cycle.
    pub frames: Vec<Frame>,
    /// Per frame, a mask of bits the solver left unconstrained. Such bits
    /// read as 0 in `frames`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dont_care: Vec<Frame>,
}

impl Trace {
    pub fn new(kind: TraceKind, violated_property: impl Into<String>, frames: Vec<Frame>) -> Trace {
        assert!(!frames.is_empty(), "a trace has at least one frame");
        Trace {
            kind,
            violated_property: violated_property.into(),
            violated_frame: frames.len() - 1,
            frames,
            dont_care: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> &Frame {
        self.frames.last().expect("non-empty trace")
    }

    /// Don't-care mask of `id` at frame `t`, 0 when none recorded.
    pub fn dont_care_mask(&self, t: usize, id: VarId) -> u64 {
        self.dont_care.get(t).and_then(|f| f.get(id)).unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces serialize")
    }

    pub fn from_json(text: &str) -> Result<Trace, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Decodes frames `0..frames` of every input and state variable from a model.
pub fn extract_trace(
    ctx: &BlastContext,
    model: &Assignment,
    ts: &TransitionSystem,
    frames: usize,
    kind: TraceKind,
    violated_property: &str,
) -> Trace {
    let mut values = Vec::with_capacity(frames);
    let mut dont_care = Vec::with_capacity(frames);
    for t in 0..frames {
        let mut f = Frame::default();
        let mut dc = Frame::default();
        for id in ts.inputs.iter().copied().chain(ts.state_ids()) {
            let (v, mask) = ctx.decode_var(model, id, ts.width_of(id), t as u32);
            f.set(id, v);
            if mask != 0 {
                dc.set(id, mask);
            }
        }
        values.push(f);
        dont_care.push(dc);
    }
    let mut trace = Trace::new(kind, violated_property, values);
    if dont_care.iter().any(|f| !f.is_empty()) {
        trace.dont_care = dont_care;
    }
    trace
}
