//! Counterexample traces: decoding from solver models, VCD output and text
//! waveforms.

mod render;
mod trace;
mod vcd;

pub use render::{render_ascii, Highlight, RenderOptions, WaveRender, DONT_CARE_MARK, VIOLATION_MARK};
pub use trace::{extract_trace, Trace, TraceKind};
pub use vcd::{read_vcd, to_vcd, VcdChange, VcdDocument, VcdError, VcdVar};
