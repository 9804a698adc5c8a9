//! Value change dump writer and a strict reader used to validate output.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::Trace;
use crate::ir::{TransitionSystem, VarKind};

/// Short identifier code for the n-th variable: base-94 over `!`..`~`.
fn id_code(mut n: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'!' + (n % 94) as u8) as char);
        n /= 94;
        if n == 0 {
            break;
        }
        n -= 1;
    }
    s
}

fn binary(value: u64) -> String {
    format!("b{value:b}")
}

/// Renders a trace as VCD. One time unit per frame; states are `reg`,
/// inputs are `wire`. Frame 0 dumps every variable, later frames only the
/// ones that changed.
pub fn to_vcd(trace: &Trace, ts: &TransitionSystem) -> String {
    let mut out = String::new();
    out.push_str("$version lemmaforge $end\n");
    out.push_str("$timescale 1ns $end\n");
    writeln!(out, "$scope module {} $end", ts.name).unwrap();
    let ids: Vec<_> = ts.state_ids().chain(ts.inputs.iter().copied()).collect();
    let codes: Vec<String> = (0..ids.len()).map(id_code).collect();
    for (id, code) in ids.iter().zip(&codes) {
        let v = ts.var(*id);
        let kind = match v.kind {
            VarKind::State => "reg",
            VarKind::Input => "wire",
        };
        writeln!(out, "$var {kind} {} {code} {} $end", v.width, v.name).unwrap();
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");
    for (t, frame) in trace.frames.iter().enumerate() {
        writeln!(out, "#{t}").unwrap();
        for (id, code) in ids.iter().zip(&codes) {
            let value = frame.get(*id).unwrap_or(0);
            let changed = t == 0 || trace.frames[t - 1].get(*id).unwrap_or(0) != value;
            if changed {
                writeln!(out, "{} {code}", binary(value)).unwrap();
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcdVar {
    pub kind: String,
    pub width: u32,
    pub code: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcdChange {
    pub time: u64,
    pub code: String,
    pub value: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VcdDocument {
    pub timescale: Option<String>,
    pub vars: Vec<VcdVar>,
    pub changes: Vec<VcdChange>,
    /// Every `#t` marker, in order.
    pub timestamps: Vec<u64>,
}

impl VcdDocument {
    /// Value of the variable called `name` at `time`, holding the last change.
    pub fn value_at(&self, name: &str, time: u64) -> Option<u64> {
        let code = &self.vars.iter().find(|v| v.name == name)?.code;
        self.changes
            .iter()
            .filter(|c| &c.code == code && c.time <= time)
            .last()
            .map(|c| c.value)
    }

    pub fn last_time(&self) -> Option<u64> {
        self.timestamps.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("VCD: {0}")]
pub struct VcdError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, VcdError> {
    Err(VcdError(msg.into()))
}

/// Parses VCD text and checks that every value change refers to a declared
/// variable, fits its width, and that timestamps strictly increase.
/// Four-state digits are rejected: this tool only writes two-state values.
pub fn read_vcd(text: &str) -> Result<VcdDocument, VcdError> {
    let mut doc = VcdDocument::default();
    let mut tokens = text.split_whitespace().peekable();
    let mut widths: HashMap<String, u32> = HashMap::new();
    let mut depth = 0i32;
    let mut defs_done = false;
    let mut time: Option<u64> = None;

    let until_end = |tokens: &mut std::iter::Peekable<std::str::SplitWhitespace<'_>>, what: &str| {
        let mut body = Vec::new();
        loop {
            match tokens.next() {
                Some("$end") => return Ok(body),
                Some(t) => body.push(t.to_string()),
                None => return err(format!("unterminated {what}")),
            }
        }
    };

    while let Some(tok) = tokens.next() {
        match tok {
            "$comment" | "$date" | "$version" => {
                until_end(&mut tokens, tok)?;
            }
            "$timescale" => {
                doc.timescale = Some(until_end(&mut tokens, tok)?.join(" "));
            }
            "$scope" => {
                if defs_done {
                    return err("$scope after $enddefinitions");
                }
                until_end(&mut tokens, tok)?;
                depth += 1;
            }
            "$upscope" => {
                until_end(&mut tokens, tok)?;
                depth -= 1;
                if depth < 0 {
                    return err("unbalanced $upscope");
                }
            }
            "$var" => {
                if defs_done {
                    return err("$var after $enddefinitions");
                }
                let body = until_end(&mut tokens, tok)?;
                if body.len() < 4 {
                    return err(format!("short $var declaration: {}", body.join(" ")));
                }
                let width: u32 = body[1]
                    .parse()
                    .map_err(|_| VcdError(format!("bad width `{}`", body[1])))?;
                if width == 0 {
                    return err("zero-width variable");
                }
                if widths.insert(body[2].clone(), width).is_some() {
                    return err(format!("identifier `{}` declared twice", body[2]));
                }
                doc.vars.push(VcdVar {
                    kind: body[0].clone(),
                    width,
                    code: body[2].clone(),
                    name: body[3].clone(),
                });
            }
            "$enddefinitions" => {
                until_end(&mut tokens, tok)?;
                if depth != 0 {
                    return err("unclosed $scope");
                }
                defs_done = true;
            }
            "$dumpvars" | "$dumpall" | "$dumpon" | "$dumpoff" | "$end" => {}
            t if t.starts_with('#') => {
                if !defs_done {
                    return err("timestamp before $enddefinitions");
                }
                let v: u64 = t[1..].parse().map_err(|_| VcdError(format!("bad timestamp `{t}`")))?;
                if time.is_some_and(|prev| v <= prev) {
                    return err(format!("timestamp #{v} does not increase"));
                }
                time = Some(v);
                doc.timestamps.push(v);
            }
            t => {
                let Some(now) = time else {
                    return err(format!("value change `{t}` before first timestamp"));
                };
                let (digits, code) = if let Some(bits) = t.strip_prefix(['b', 'B']) {
                    let code = tokens.next().ok_or_else(|| VcdError("vector change without identifier".into()))?;
                    (bits.to_string(), code.to_string())
                } else if t.starts_with(['0', '1']) && t.len() > 1 {
                    (t[..1].to_string(), t[1..].to_string())
                } else {
                    return err(format!("unexpected token `{t}`"));
                };
                let Some(&width) = widths.get(&code) else {
                    return err(format!("change for undeclared identifier `{code}`"));
                };
                if digits.is_empty() || digits.len() as u32 > width {
                    return err(format!("value `{digits}` does not fit width {width}"));
                }
                let value = u64::from_str_radix(&digits, 2)
                    .map_err(|_| VcdError(format!("non-binary value `{digits}`")))?;
                doc.changes.push(VcdChange { time: now, code, value });
            }
        }
    }
    if !defs_done {
        return err("missing $enddefinitions");
    }
    Ok(doc)
}
