//! `lemmaforge`: k-induction checking of RTL assertions with helper-lemma
//! suggestion.
//!
//! Exit codes: 0 all proven, 1 a property is false, 2 unknown, 3 usage or
//! input error.

mod config;
mod looping;
mod review;
mod session;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use lemmaforge::cex::{render_ascii, RenderOptions, Trace};
use lemmaforge::engine::{bfs_oracle, bmc, check_vacuity, kinduction, prove_all, OracleResult, ProofResult, ReportRecord};
use lemmaforge::suggest::{
    build_prompt, cti_block_candidates, extract_assertions, gen_template_candidates, llm_request, simulate_filter,
    CandidateInvariant, CandidateOrigin, Flow, Reject,
};
use serde::Serialize;

use config::{CommonArgs, RunConfig, Suggester};
use session::{exit_code, print_records, Artifacts, Session};

#[derive(Parser)]
#[command(name = "lemmaforge", version, about = "k-induction for RTL assertions, with helper-lemma suggestion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove every property with k-induction, using proven helper lemmas.
    Check(CommonArgs),
    /// Search for counterexamples from reset up to --depth.
    Bmc(CommonArgs),
    /// k-induction without lemmas, then BMC on anything left unknown.
    Prove(CommonArgs),
    /// Print candidate lemmas without proving them.
    Suggest(CommonArgs),
    /// Prove, suggest lemmas from counterexamples, and repeat.
    Loop(CommonArgs),
    /// Exhaustive explicit-state check for small designs.
    Oracle(CommonArgs),
    /// Print the elaborated transition system.
    Dump(CommonArgs),
}

const USAGE_ERROR: u8 = 3;

fn warn_vacuity(s: &Session, cfg: &RunConfig) {
    match check_vacuity(&s.ts, &cfg.engine) {
        Ok(true) => eprintln!("warning: the assumptions contradict each other or the reset state; every property holds vacuously"),
        Ok(false) => {}
        Err(e) => log::warn!("vacuity check gave up: {e}"),
    }
}

fn cmd_check(cfg: &RunConfig) -> Result<i32> {
    let s = Session::load(cfg)?;
    warn_vacuity(&s, cfg);
    let art = Artifacts::new(cfg.output_dir.as_deref())?;
    let report = prove_all(&s.ts, &s.targets, &s.lemmas, &cfg.engine);
    let records = report.records();
    print_records(&records, cfg.json);
    art.report("report.jsonl", &records)?;
    for r in &report.results {
        if let Some(trace) = r.result.trace() {
            let focus = s.ts.property(&r.name).cloned().or_else(|| {
                s.lemmas
                    .iter()
                    .find(|l| l.name == r.name)
                    .map(|l| l.as_property())
            });
            art.trace("", &s.ts, trace, focus.as_ref())?;
        }
    }
    Ok(exit_code(s.targets.iter().map(|p| report.get(&p.name).unwrap())))
}

fn timed(f: impl FnOnce() -> ProofResult) -> (ProofResult, u64) {
    let t = std::time::Instant::now();
    let r = f();
    (r, t.elapsed().as_millis() as u64)
}

fn record(name: &str, result: &ProofResult, time_ms: u64) -> ReportRecord {
    ReportRecord::from(&lemmaforge::engine::PropertyReport {
        name: name.to_string(),
        result: result.clone(),
        time_ms,
        lemma_names_used: Vec::new(),
    })
}

/// Shared driver for `bmc` and `prove`: one result per target.
fn per_target(cfg: &RunConfig, run: impl Fn(&Session, &lemmaforge::ir::Property) -> ProofResult) -> Result<i32> {
    let s = Session::load(cfg)?;
    warn_vacuity(&s, cfg);
    let art = Artifacts::new(cfg.output_dir.as_deref())?;
    let mut records = Vec::new();
    let mut results = Vec::new();
    for p in &s.targets {
        let (r, ms) = timed(|| run(&s, p));
        if let Some(trace) = r.trace() {
            art.trace("", &s.ts, trace, Some(p))?;
        }
        records.push(record(&p.name, &r, ms));
        results.push(r);
    }
    print_records(&records, cfg.json);
    art.report("report.jsonl", &records)?;
    Ok(exit_code(&results))
}

fn cmd_bmc(cfg: &RunConfig) -> Result<i32> {
    per_target(cfg, |s, p| bmc(&s.ts, p, cfg.bmc_depth, &[], &cfg.engine))
}

fn cmd_prove(cfg: &RunConfig) -> Result<i32> {
    per_target(cfg, |s, p| match kinduction(&s.ts, p, &[], &cfg.engine) {
        r @ (ProofResult::Proven { .. } | ProofResult::Falsified { .. }) => r,
        unknown => match bmc(&s.ts, p, cfg.bmc_depth, &[], &cfg.engine) {
            f @ ProofResult::Falsified { .. } => f,
            _ => unknown,
        },
    })
}

fn cmd_oracle(cfg: &RunConfig) -> Result<i32> {
    let s = Session::load(cfg)?;
    let art = Artifacts::new(cfg.output_dir.as_deref())?;
    let mut records = Vec::new();
    let mut code = 0;
    for p in &s.targets {
        let t = std::time::Instant::now();
        let (status, depth) = match bfs_oracle(&s.ts, p, cfg.max_states) {
            Ok(OracleResult::Holds) => ("holds", None),
            Ok(OracleResult::Violated { trace }) => {
                art.trace("", &s.ts, &trace, Some(p))?;
                code = 1;
                ("violated", Some(trace.violated_frame as u32))
            }
            Ok(OracleResult::Exhausted) => ("exhausted", None),
            Err(e) => {
                eprintln!("{}: {e}", p.name);
                ("too_large", None)
            }
        };
        if code == 0 && status != "holds" {
            code = 2;
        }
        records.push(ReportRecord {
            name: p.name.clone(),
            status: status.into(),
            k: None,
            depth,
            time_ms: t.elapsed().as_millis() as u64,
            lemma_names_used: Vec::new(),
        });
    }
    print_records(&records, cfg.json);
    art.report("report.jsonl", &records)?;
    Ok(code)
}

fn cmd_dump(cfg: &RunConfig) -> Result<i32> {
    let s = Session::load(cfg)?;
    print!("{}", s.ts.dump());
    Ok(0)
}

#[derive(Serialize)]
struct CandidateLine<'a> {
    name: &'a str,
    text: String,
    origin: &'a CandidateOrigin,
}

fn load_cti(cfg: &RunConfig) -> Result<Option<Trace>> {
    let Some(path) = &cfg.cti_path else { return Ok(None) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(Trace::from_json(&text).with_context(|| format!("parsing trace {}", path.display()))?))
}

fn print_candidates(s: &Session, cands: &[CandidateInvariant], rejects: &[Reject], json: bool) {
    for c in cands {
        if json {
            let line = CandidateLine {
                name: &c.name,
                text: c.text(&s.ts),
                origin: &c.origin,
            };
            println!("{}", serde_json::to_string(&line).unwrap());
        } else {
            println!("{}: {}", c.name, c.text(&s.ts));
        }
    }
    for r in rejects {
        if json {
            println!("{}", serde_json::json!({ "reject": r }));
        } else {
            println!("rejected ({:?}): {}", r.reason, r.text);
        }
    }
}

fn cmd_suggest(cfg: &RunConfig) -> Result<i32> {
    let s = Session::load(cfg)?;
    let cti = load_cti(cfg)?;
    if matches!(cfg.suggester, Suggester::Templates | Suggester::Both) {
        let mut cands = simulate_filter(&s.ts, gen_template_candidates(&s.ts), 8, 64, 0);
        if let Some(t) = &cti {
            cands = cti_block_candidates(t, &cands);
        }
        print_candidates(&s, &cands, &[], cfg.json);
    }
    if !cfg.uses_llm() {
        return Ok(0);
    }
    let prompt = match cfg.flow {
        Flow::A => {
            let Some(path) = &cfg.spec_path else { bail!("flow A needs a specification: pass --spec <file>") };
            let spec = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            build_prompt(Flow::A, &cfg.prompt_dir, &s.source, Some(&spec), None)?
        }
        Flow::B => {
            let Some(t) = &cti else { bail!("flow B needs a counterexample: pass --cti <trace file>") };
            let focus = s.ts.property(&t.violated_property);
            let render = render_ascii(t, &s.ts, focus, RenderOptions::default()).text;
            build_prompt(Flow::B, &cfg.prompt_dir, &s.source, None, Some(&render))?
        }
    };
    cfg.llm.validate()?;
    if std::env::var_os(&cfg.llm.api_key_env).is_none() {
        bail!("environment variable {} with the API key is not set", cfg.llm.api_key_env);
    }
    match llm_request(&cfg.llm, &prompt) {
        Ok(raw) => {
            let ex = extract_assertions(&raw, &s.ts, &cfg.llm.model_id);
            print_candidates(&s, &ex.candidates, &ex.rejects, cfg.json);
            Ok(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(2)
        }
    }
}

fn cmd_loop(cfg: &RunConfig) -> Result<i32> {
    let s = Session::load(cfg)?;
    warn_vacuity(&s, cfg);
    if cfg.uses_llm() {
        cfg.llm.validate()?;
    }
    let art = Artifacts::new(cfg.output_dir.as_deref())?;
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let report = if cfg.json {
        let r = looping::run_loop(&s, cfg, &art, &mut input, &mut std::io::stderr())?;
        println!("{}", serde_json::to_string(&r)?);
        r
    } else {
        looping::run_loop(&s, cfg, &art, &mut input, &mut std::io::stdout())?
    };
    if !cfg.json {
        println!(
            "{} after {} iteration(s)",
            serde_json::to_value(report.final_status)?.as_str().unwrap_or_default(),
            report.iterations.len()
        );
    }
    Ok(report.final_status.exit_code())
}

fn run(cli: Cli) -> Result<i32> {
    let (args, f): (CommonArgs, fn(&RunConfig) -> Result<i32>) = match cli.command {
        Command::Check(a) => (a, cmd_check),
        Command::Bmc(a) => (a, cmd_bmc),
        Command::Prove(a) => (a, cmd_prove),
        Command::Suggest(a) => (a, cmd_suggest),
        Command::Loop(a) => (a, cmd_loop),
        Command::Oracle(a) => (a, cmd_oracle),
        Command::Dump(a) => (a, cmd_dump),
    };
    let cfg = RunConfig::resolve(args)?;
    f(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
