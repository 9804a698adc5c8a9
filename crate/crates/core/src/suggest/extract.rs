use serde::{Deserialize, Serialize};

use super::{dedup_candidates, CandidateInvariant, CandidateOrigin};
use crate::frontend::{parse_assertion, FrontendError};
use crate::ir::TransitionSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RejectReason {
    /// The response contained no fenced code block.
    NoCodeBlock,
    Parse(String),
    /// The statement names a signal the design does not have.
    UnknownSymbol(String),
    /// Parsed, but not a valid boolean expression over the design.
    Elaboration(String),
}

/// A statement from the response that did not become a candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub text: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub candidates: Vec<CandidateInvariant>,
    pub rejects: Vec<Reject>,
}

/// Contents of every ``` fenced block. An unterminated fence runs to the end.
fn code_blocks(raw: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in raw.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(lines) => blocks.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
}

/// Splits at `;` outside parentheses and line comments; each piece keeps
/// its terminating `;`.
fn statements(block: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut chars = block.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '/' if chars.peek() == Some(&'/') => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        cur.push('\n');
                        break;
                    }
                }
                continue;
            }
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth <= 0 => {
                cur.push(';');
                let s = cur.trim().to_string();
                if s != ";" {
                    out.push(s);
                }
                cur.clear();
                depth = 0;
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    let tail = cur.trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

/// Parses the assertions inside the fenced code blocks of a model response.
/// Every statement that does not yield a candidate is recorded as a reject.
pub fn extract_assertions(raw: &str, ts: &TransitionSystem, model: &str) -> Extraction {
    let mut ex = Extraction::default();
    let blocks = code_blocks(raw);
    if blocks.is_empty() {
        ex.rejects.push(Reject {
            text: raw.trim().to_string(),
            reason: RejectReason::NoCodeBlock,
        });
        return ex;
    }
    let symbols = ts.symbols();
    let mut n = 0;
    for block in &blocks {
        for stmt in statements(block) {
            let parsed = match parse_assertion(&stmt, &symbols) {
                Ok(a) => a,
                Err(FrontendError::UnknownSymbol { name }) => {
                    ex.rejects.push(Reject {
                        text: stmt,
                        reason: RejectReason::UnknownSymbol(name),
                    });
                    continue;
                }
                Err(e) => {
                    ex.rejects.push(Reject {
                        text: stmt,
                        reason: RejectReason::Parse(e.to_string()),
                    });
                    continue;
                }
            };
            match ts.elaborate_assertion(&parsed) {
                Ok(expr) => {
                    n += 1;
                    ex.candidates.push(CandidateInvariant {
                        name: format!("llm_{n}"),
                        expr,
                        origin: CandidateOrigin::Llm { model: model.to_string() },
                        source_text: Some(stmt),
                    });
                }
                Err(e) => ex.rejects.push(Reject {
                    text: stmt,
                    reason: RejectReason::Elaboration(e.to_string()),
                }),
            }
        }
    }
    ex.candidates = dedup_candidates(ex.candidates);
    ex
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_blocks() {
        let raw = "text\n```systemverilog\na;\n```\nmore\n```\nb;\nc;\n";
        assert_eq!(code_blocks(raw), vec!["a;".to_string(), "b;\nc;".to_string()]);
        assert!(code_blocks("no code here").is_empty());
    }

    #[test]
    fn splits_statements() {
        let s = statements("assert property (@(posedge clk) a == b); // x; y\n  c; d");
        assert_eq!(s, vec!["assert property (@(posedge clk) a == b);", "c;", "d"]);
    }
}
