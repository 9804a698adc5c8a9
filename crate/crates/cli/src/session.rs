//! Loading a design with its assertions, and writing run artifacts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lemmaforge::cex::{render_ascii, to_vcd, RenderOptions, Trace};
use lemmaforge::engine::{Lemma, LemmaOrigin, ProofResult, ReportRecord};
use lemmaforge::frontend::{parse_assertion_file, parse_module_source};
use lemmaforge::ir::{elaborate, Property, TransitionSystem};

use crate::config::RunConfig;

pub struct Session {
    pub ts: TransitionSystem,
    pub source: String,
    pub targets: Vec<Property>,
    /// Candidate lemmas from `--lemmas` files.
    pub lemmas: Vec<Lemma>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Session {
    pub fn load(cfg: &RunConfig) -> Result<Session> {
        let source = read(&cfg.design_path)?;
        let ast = parse_module_source(&source).with_context(|| format!("parsing {}", cfg.design_path.display()))?;
        let mut ts = elaborate(&ast, &[]).with_context(|| format!("elaborating {}", cfg.design_path.display()))?;
        for path in &cfg.assertion_paths {
            let asserts = parse_assertion_file(&read(path)?, &ts.symbols()).with_context(|| format!("parsing {}", path.display()))?;
            ts.add_assertions(&asserts).with_context(|| format!("elaborating {}", path.display()))?;
        }
        let mut lemmas = Vec::new();
        for path in &cfg.lemma_paths {
            let asserts = parse_assertion_file(&read(path)?, &ts.symbols()).with_context(|| format!("parsing {}", path.display()))?;
            for a in asserts {
                let expr = ts.elaborate_assertion(&a).with_context(|| format!("elaborating {}", path.display()))?;
                lemmas.push(Lemma::candidate(a.name.clone(), expr, LemmaOrigin::User));
            }
        }
        let targets = if cfg.targets.is_empty() {
            ts.properties.clone()
        } else {
            let mut out = Vec::new();
            for name in &cfg.targets {
                match ts.property(name) {
                    Some(p) => out.push(p.clone()),
                    None => bail!("no property named `{name}`"),
                }
            }
            out
        };
        Ok(Session {
            ts,
            source,
            targets,
            lemmas,
        })
    }
}

/// The exit code for a set of results: 1 if anything failed, 0 if all
/// proved, 2 otherwise.
pub fn exit_code<'a>(results: impl IntoIterator<Item = &'a ProofResult>) -> i32 {
    let mut code = 0;
    for r in results {
        if r.is_falsified() {
            return 1;
        }
        if !r.is_proven() {
            code = 2;
        }
    }
    code
}

/// File-name-safe version of a property name.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

pub struct Artifacts {
    dir: Option<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: Option<&Path>) -> Result<Artifacts> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Artifacts {
            dir: dir.map(Path::to_path_buf),
        })
    }

    pub fn path(&self, file: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(file))
    }

    pub fn write(&self, file: &str, contents: &str) -> Result<Option<PathBuf>> {
        let Some(path) = self.path(file) else { return Ok(None) };
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(Some(path))
    }

    /// Writes `<name>.vcd`, `<name>.txt` (text waveform) and
    /// `<name>.cti.json` for a trace; `prefix` keeps loop iterations apart.
    pub fn trace(&self, prefix: &str, ts: &TransitionSystem, trace: &Trace, focus: Option<&Property>) -> Result<()> {
        let stem = format!("{prefix}{}", file_stem(&trace.violated_property));
        self.write(&format!("{stem}.vcd"), &to_vcd(trace, ts))?;
        let render = render_ascii(trace, ts, focus, RenderOptions::default());
        self.write(&format!("{stem}.txt"), &render.text)?;
        self.write(&format!("{stem}.cti.json"), &trace.to_json())?;
        Ok(())
    }

    pub fn report(&self, file: &str, records: &[ReportRecord]) -> Result<()> {
        let text: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
        self.write(file, &text)?;
        Ok(())
    }
}

/// Prints records as a table, or as JSON lines.
pub fn print_records(records: &[ReportRecord], json: bool) {
    if json {
        for r in records {
            println!("{}", r.to_json_line());
        }
        return;
    }
    let w = records.iter().map(|r| r.name.len()).max().unwrap_or(4).max(8);
    println!("{:<w$}  {:<16} {:>4} {:>6} {:>9}  lemmas", "property", "status", "k", "depth", "time_ms");
    for r in records {
        let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{:<w$}  {:<16} {:>4} {:>6} {:>9}  {}",
            r.name,
            r.status,
            opt(r.k),
            opt(r.depth),
            r.time_ms,
            r.lemma_names_used.join(",")
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let proven = ProofResult::Proven { k: 1 };
        let bound = ProofResult::UnknownBound { depth: 3 };
        assert_eq!(exit_code([&proven]), 0);
        assert_eq!(exit_code([&proven, &bound]), 2);
        assert_eq!(exit_code(std::iter::empty()), 0);
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("a/b c"), "a_b_c");
        assert_eq!(file_stem("never_70"), "never_70");
    }
}
