use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const PROMPT_SPEC_FILE: &str = "prompt_spec.txt";
pub const PROMPT_CEX_FILE: &str = "prompt_cex.txt";

/// Line that separates the system part of a template from the user part.
const SECTION_BREAK: &str = "---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flow {
    /// Specification text plus RTL.
    A,
    /// Induction-step counterexample plus RTL.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Placeholder {
    Rtl,
    Spec,
    Cex,
}

impl Placeholder {
    pub fn token(self) -> &'static str {
        match self {
            Placeholder::Rtl => "{{RTL}}",
            Placeholder::Spec => "{{SPEC}}",
            Placeholder::Cex => "{{CEX}}",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_text: String,
    pub user_text: String,
    pub placeholders_filled: BTreeSet<Placeholder>,
}

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("prompt template not found: {}", path.display())]
    TemplateNotFound { path: PathBuf },
    #[error("no input given for the {} placeholder", .placeholder.token())]
    MissingPlaceholderInput { placeholder: Placeholder },
}

/// Replaces placeholders in one left-to-right pass, so placeholder-like text
/// inside the substituted values is left alone.
fn substitute(template: &str, values: &[(Placeholder, &str)], filled: &mut BTreeSet<Placeholder>) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(pos) = rest.find("{{") {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        match values.iter().find(|(p, _)| tail.starts_with(p.token())) {
            Some((p, v)) => {
                out.push_str(v);
                filled.insert(*p);
                rest = &tail[p.token().len()..];
            }
            None => {
                out.push_str("{{");
                rest = &tail[2..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Loads the template for `flow` from `prompt_dir` and fills it in.
///
/// A template file holds the system text, a line containing only `---`,
/// then the user text.
pub fn build_prompt(
    flow: Flow,
    prompt_dir: &Path,
    rtl_text: &str,
    spec_text: Option<&str>,
    cex_render: Option<&str>,
) -> Result<PromptBundle, PromptError> {
    let (file, extra) = match flow {
        Flow::A => (
            PROMPT_SPEC_FILE,
            (
                Placeholder::Spec,
                spec_text.ok_or(PromptError::MissingPlaceholderInput {
                    placeholder: Placeholder::Spec,
                })?,
            ),
        ),
        Flow::B => (
            PROMPT_CEX_FILE,
            (
                Placeholder::Cex,
                cex_render.ok_or(PromptError::MissingPlaceholderInput {
                    placeholder: Placeholder::Cex,
                })?,
            ),
        ),
    };
    let path = prompt_dir.join(file);
    let template = std::fs::read_to_string(&path).map_err(|_| PromptError::TemplateNotFound { path: path.clone() })?;
    let (system, user) = match template.split_once(&format!("\n{SECTION_BREAK}\n")) {
        Some((s, u)) => (s.to_string(), u.to_string()),
        None => (String::new(), template),
    };
    let values = [(Placeholder::Rtl, rtl_text), extra];
    let mut filled = BTreeSet::new();
    let system_text = substitute(&system, &values, &mut filled);
    let user_text = substitute(&user, &values, &mut filled);
    Ok(PromptBundle {
        system_text: system_text.trim_end().to_string(),
        user_text,
        placeholders_filled: filled,
    })
}
