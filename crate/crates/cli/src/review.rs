//! Human review of suggested lemmas before they reach the prover.

use std::io::{BufRead, Write};

use lemmaforge::ir::TransitionSystem;
use lemmaforge::suggest::{CandidateInvariant, CandidateOrigin};

fn origin_text(c: &CandidateInvariant) -> String {
    match &c.origin {
        CandidateOrigin::Template { id, .. } => format!("template {id}"),
        CandidateOrigin::Llm { model } => format!("model {model}"),
        CandidateOrigin::User => "user".into(),
    }
}

/// Asks y/n for each candidate when `interactive`, otherwise approves all.
/// End of input rejects whatever is left. Approval only lets a candidate be
/// tried; it is still proved before use.
pub fn review_gate<R: BufRead, W: Write>(
    ts: &TransitionSystem,
    candidates: Vec<CandidateInvariant>,
    interactive: bool,
    input: &mut R,
    output: &mut W,
) -> Vec<CandidateInvariant> {
    if !interactive {
        return candidates;
    }
    let mut approved = Vec::new();
    for c in candidates {
        let shown = c.source_text.clone().unwrap_or_else(|| c.text(ts));
        let _ = write!(output, "{} [{}]\n  {}\nuse this lemma? [y/n] ", c.name, origin_text(&c), shown);
        let _ = output.flush();
        loop {
            let mut line = String::new();
            match input.read_line(&mut line) {
                Ok(0) | Err(_) => {
                    let _ = writeln!(output);
                    return approved;
                }
                Ok(_) => {}
            }
            match line.trim().to_ascii_lowercase().as_str() {
                "y" | "yes" => {
                    approved.push(c);
                    break;
                }
                "n" | "no" => break,
                _ => {
                    let _ = write!(output, "please answer y or n: ");
                    let _ = output.flush();
                }
            }
        }
    }
    approved
}
