//! Text waveform of a trace with a diagnosis of the failing comparison.

use serde::{Deserialize, Serialize};

use super::{Trace, TraceKind};
use crate::ir::{eval, BinOp, Expr, Property, TransitionSystem, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Highlight {
    pub var: VarId,
    pub bit: u32,
    pub frame: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveRender {
    pub text: String,
    pub highlights: Vec<Highlight>,
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// No output line is longer than this.
    pub line_width: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { line_width: 100 }
    }
}

/// Marks a value that contains solver don't-care bits.
pub const DONT_CARE_MARK: char = '?';
/// Marks the violating frame in the header.
pub const VIOLATION_MARK: char = '*';

struct Diagnosis {
    highlight: Option<Highlight>,
    callout: String,
}

/// Lowest differing bit of the two operands of a failing comparison, named
/// through the right operand when it is a plain variable bit, else the left.
fn diagnose(ts: &TransitionSystem, trace: &Trace, prop: &Property) -> Option<Diagnosis> {
    let Expr::Binop { op, lhs, rhs } = &prop.expr else {
        return None;
    };
    if !op.is_predicate() {
        return None;
    }
    let frame_idx = trace.violated_frame;
    let frame = &trace.frames[frame_idx];
    let (a, b) = (eval(lhs, frame), eval(rhs, frame));
    let diff = a ^ b;
    if diff == 0 {
        return None;
    }
    let bit = diff.trailing_zeros();
    let operands = format!(
        "{} = {:#x}, {} = {:#x}",
        ts.show(lhs),
        a,
        ts.show(rhs),
        b
    );
    let source = rhs.bit_source(bit).map(|s| (s, b)).or_else(|| lhs.bit_source(bit).map(|s| (s, a)));
    let op_text = match op {
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::Ult => "<",
        BinOp::Ule => "<=",
        BinOp::Ugt => ">",
        BinOp::Uge => ">=",
        _ => unreachable!(),
    };
    Some(match source {
        Some(((var, var_bit), value)) => {
            let level = if value >> bit & 1 == 1 { 0 } else { 1 };
            Diagnosis {
                highlight: Some(Highlight {
                    var,
                    bit: var_bit,
                    frame: frame_idx,
                }),
                callout: format!(
                    "frame {frame_idx}: `{op_text}` fails ({operands}): bit {var_bit} of {} is not logic {level}",
                    ts.name_of(var)
                ),
            }
        }
        None => Diagnosis {
            highlight: None,
            callout: format!("frame {frame_idx}: `{op_text}` fails ({operands}): operands first differ at bit {bit}"),
        },
    })
}

fn hex_digits(width: u32) -> usize {
    width.div_ceil(4) as usize
}

/// Splits a line into pieces of at most `width` characters.
fn hard_wrap(line: &str, width: usize, out: &mut String) {
    let chars: Vec<char> = line.chars().collect();
    if chars.is_empty() {
        out.push('\n');
        return;
    }
    for chunk in chars.chunks(width.max(1)) {
        out.extend(chunk.iter());
        out.push('\n');
    }
}

/// One row per variable with hex values per frame. When `focus` is a failing
/// comparison, the lowest differing operand bit is highlighted and explained.
pub fn render_ascii(trace: &Trace, ts: &TransitionSystem, focus: Option<&Property>, opts: RenderOptions) -> WaveRender {
    let width = opts.line_width.max(1);
    let ids: Vec<VarId> = ts.state_ids().chain(ts.inputs.iter().copied()).collect();
    let diagnosis = focus.and_then(|p| diagnose(ts, trace, p));
    let highlights: Vec<Highlight> = diagnosis.iter().filter_map(|d| d.highlight).collect();

    let name_w = ids
        .iter()
        .map(|&id| ts.name_of(id).len())
        .chain(["frame".len()])
        .max()
        .unwrap_or(5);
    let cell_w = ids
        .iter()
        .map(|&id| hex_digits(ts.width_of(id)))
        .max()
        .unwrap_or(1)
        .max(trace.frames.len().to_string().len())
        + 1;
    let col = cell_w + 3;
    let per_line = ((width.saturating_sub(name_w)) / col).max(1);

    let kind = match trace.kind {
        TraceKind::CexFromInit => "counterexample",
        TraceKind::Cti => "induction-step counterexample",
    };
    let mut lines = vec![format!(
        "{kind} for {} ({} frames, violated at frame {})",
        trace.violated_property,
        trace.frames.len(),
        trace.violated_frame
    )];
    let frames: Vec<usize> = (0..trace.frames.len()).collect();
    for chunk in frames.chunks(per_line) {
        let mut header = format!("{:<name_w$}", "frame");
        for &t in chunk {
            let mark = if t == trace.violated_frame { VIOLATION_MARK } else { ' ' };
            header += &format!(" | {:<cell_w$}", format!("{t}{mark}"));
        }
        lines.push(header.trim_end().to_string());
        for &id in &ids {
            let mut row = format!("{:<name_w$}", ts.name_of(id));
            for &t in chunk {
                let v = trace.frames[t].get(id).unwrap_or(0);
                let dc = if trace.dont_care_mask(t, id) != 0 { DONT_CARE_MARK } else { ' ' };
                let hit = highlights.iter().any(|h| h.var == id && h.frame == t);
                let hl = if hit { '<' } else { dc };
                let digits = hex_digits(ts.width_of(id));
                row += &format!(" | {:<cell_w$}", format!("{v:0digits$X}{hl}"));
            }
            lines.push(row.trim_end().to_string());
        }
    }
    if trace.dont_care.iter().any(|f| !f.is_empty()) {
        lines.push(format!("{DONT_CARE_MARK} = value contains unconstrained bits, shown as 0"));
    }
    if let Some(d) = &diagnosis {
        lines.push(d.callout.clone());
    }
    let mut text = String::new();
    for l in &lines {
        hard_wrap(l, width, &mut text);
    }
    WaveRender { text, highlights }
}
