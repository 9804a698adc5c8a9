//! Run configuration: an optional INI file overlaid with command-line flags.
//!
//! The INI file uses the long flag names as keys, either at the top level or
//! in any section, e.g. `max-k = 6` or `[llm] llm-endpoint = http://...`.
//! Repeatable flags take a comma-separated list.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use lemmaforge::engine::{EngineConfig, LemmaMode};
use lemmaforge::suggest::{Flow, LlmConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suggester {
    Templates,
    Llm,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowArg {
    A,
    B,
}

impl From<FlowArg> for Flow {
    fn from(f: FlowArg) -> Flow {
        match f {
            FlowArg::A => Flow::A,
            FlowArg::B => Flow::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sequential,
    Simultaneous,
}

/// Flags shared by every command. All are optional here so that an INI
/// file can supply them; `RunConfig::resolve` applies the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Design source file.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Assertion file with target properties (repeatable).
    #[arg(long = "assert", value_name = "FILE")]
    pub assert: Vec<PathBuf>,
    /// Assertion file whose assertions are candidate helper lemmas.
    #[arg(long = "lemmas", value_name = "FILE")]
    pub lemmas: Vec<PathBuf>,
    /// Only check the named properties (repeatable).
    #[arg(long = "target", value_name = "NAME")]
    pub target: Vec<String>,
    /// Plain-text specification for suggestion flow A.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Counterexample trace (`.cti.json`) for suggestion flow B.
    #[arg(long)]
    pub cti: Option<PathBuf>,
    #[arg(long = "max-k")]
    pub max_k: Option<u32>,
    /// BMC depth.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Require distinct states along the induction window.
    #[arg(long = "simple-path")]
    pub simple_path: bool,
    #[arg(long = "lemma-mode", value_enum)]
    pub lemma_mode: Option<ModeArg>,
    /// Solver conflict budget per query.
    #[arg(long = "conflict-budget")]
    pub conflict_budget: Option<u64>,
    #[arg(long, value_enum)]
    pub suggester: Option<Suggester>,
    #[arg(long, value_enum)]
    pub flow: Option<FlowArg>,
    /// Ask before using each language-model suggestion.
    #[arg(long)]
    pub review: bool,
    /// Worker threads for independent property checks.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// Template candidates tried per loop iteration.
    #[arg(long = "max-candidates")]
    pub max_candidates: Option<usize>,
    /// State limit for the explicit-state oracle.
    #[arg(long = "max-states")]
    pub max_states: Option<usize>,
    /// Directory for reports and traces.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON lines instead of tables.
    #[arg(long)]
    pub json: bool,
    #[arg(long = "prompt-dir")]
    pub prompt_dir: Option<PathBuf>,
    #[arg(long = "llm-endpoint")]
    pub llm_endpoint: Option<String>,
    #[arg(long = "llm-model")]
    pub llm_model: Option<String>,
    #[arg(long = "llm-temperature")]
    pub llm_temperature: Option<f64>,
    #[arg(long = "llm-max-tokens")]
    pub llm_max_tokens: Option<u32>,
    #[arg(long = "llm-timeout-ms")]
    pub llm_timeout_ms: Option<u64>,
    /// Environment variable that holds the API key.
    #[arg(long = "llm-api-key-env")]
    pub llm_api_key_env: Option<String>,
    #[arg(long = "llm-retries")]
    pub llm_retries: Option<u32>,
    /// INI file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub design_path: PathBuf,
    pub assertion_paths: Vec<PathBuf>,
    pub lemma_paths: Vec<PathBuf>,
    pub targets: Vec<String>,
    pub spec_path: Option<PathBuf>,
    pub cti_path: Option<PathBuf>,
    pub engine: EngineConfig,
    pub bmc_depth: u32,
    pub suggester: Suggester,
    pub flow: Flow,
    pub llm: LlmConfig,
    pub prompt_dir: PathBuf,
    pub review: bool,
    pub max_loop_iters: usize,
    pub max_candidates: usize,
    pub max_states: usize,
    pub output_dir: Option<PathBuf>,
    pub json: bool,
}

/// Key/value pairs from an INI file, later keys winning.
fn read_ini(path: &Path) -> Result<Vec<(String, String)>> {
    let ini = ini::Ini::load_from_file(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = Vec::new();
    for (_, props) in ini.iter() {
        for (k, v) in props.iter() {
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok(out)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => bail!("config key `{key}`: expected a boolean, got `{v}`"),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| anyhow::anyhow!("config key `{key}`: bad number `{v}`"))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, true).map_err(|_| anyhow::anyhow!("config key `{key}`: unknown value `{v}`"))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl CommonArgs {
    /// Fills every flag the command line left unset from `pairs`. Paths in
    /// the file are relative to `base`.
    fn overlay(&mut self, pairs: &[(String, String)], base: &Path) -> Result<()> {
        let path = |v: &str| base.join(v);
        for (key, v) in pairs {
            let v = v.as_str();
            match key.as_str() {
                "design" => {
                    self.design.get_or_insert_with(|| path(v));
                }
                "assert" if self.assert.is_empty() => self.assert = list(v).map(path).collect(),
                "lemmas" if self.lemmas.is_empty() => self.lemmas = list(v).map(path).collect(),
                "target" if self.target.is_empty() => self.target = list(v).map(String::from).collect(),
                "assert" | "lemmas" | "target" => {}
                "spec" => {
                    self.spec.get_or_insert_with(|| path(v));
                }
                "cti" => {
                    self.cti.get_or_insert_with(|| path(v));
                }
                "max-k" => {
                    self.max_k.get_or_insert(parse_num(key, v)?);
                }
                "depth" => {
                    self.depth.get_or_insert(parse_num(key, v)?);
                }
                "simple-path" => self.simple_path |= parse_bool(key, v)?,
                "lemma-mode" => {
                    self.lemma_mode.get_or_insert(parse_enum(key, v)?);
                }
                "conflict-budget" => {
                    self.conflict_budget.get_or_insert(parse_num(key, v)?);
                }
                "suggester" => {
                    self.suggester.get_or_insert(parse_enum(key, v)?);
                }
                "flow" => {
                    self.flow.get_or_insert(parse_enum(key, v)?);
                }
                "review" => self.review |= parse_bool(key, v)?,
                "jobs" => {
                    self.jobs.get_or_insert(parse_num(key, v)?);
                }
                "max-iters" => {
                    self.max_iters.get_or_insert(parse_num(key, v)?);
                }
                "max-candidates" => {
                    self.max_candidates.get_or_insert(parse_num(key, v)?);
                }
                "max-states" => {
                    self.max_states.get_or_insert(parse_num(key, v)?);
                }
                "out" => {
                    self.out.get_or_insert_with(|| path(v));
                }
                "json" => self.json |= parse_bool(key, v)?,
                "prompt-dir" => {
                    self.prompt_dir.get_or_insert_with(|| path(v));
                }
                "llm-endpoint" => {
                    self.llm_endpoint.get_or_insert_with(|| v.to_string());
                }
                "llm-model" => {
                    self.llm_model.get_or_insert_with(|| v.to_string());
                }
                "llm-temperature" => {
                    self.llm_temperature.get_or_insert(parse_num(key, v)?);
                }
                "llm-max-tokens" => {
                    self.llm_max_tokens.get_or_insert(parse_num(key, v)?);
                }
                "llm-timeout-ms" => {
                    self.llm_timeout_ms.get_or_insert(parse_num(key, v)?);
                }
                "llm-api-key-env" => {
                    self.llm_api_key_env.get_or_insert_with(|| v.to_string());
                }
                "llm-retries" => {
                    self.llm_retries.get_or_insert(parse_num(key, v)?);
                }
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn resolve(mut args: CommonArgs) -> Result<RunConfig> {
        if let Some(cfg_path) = args.config.clone() {
            let pairs = read_ini(&cfg_path)?;
            let base = cfg_path.parent().unwrap_or(Path::new(".")).to_path_buf();
            args.overlay(&pairs, &base)?;
        }
        let Some(design_path) = args.design else {
            bail!("no design given; pass --design or set `design` in the config file");
        };
        let defaults = EngineConfig::default();
        let engine = EngineConfig {
            max_k: args.max_k.unwrap_or(defaults.max_k),
            bmc_depth: args.depth.unwrap_or(defaults.bmc_depth),
            simple_path: args.simple_path,
            conflict_budget: args.conflict_budget.or(defaults.conflict_budget),
            lemma_mode: match args.lemma_mode {
                Some(ModeArg::Simultaneous) => LemmaMode::Simultaneous,
                Some(ModeArg::Sequential) => LemmaMode::Sequential,
                None => defaults.lemma_mode,
            },
            jobs: args.jobs.unwrap_or(defaults.jobs).max(1),
        };
        if engine.max_k == 0 {
            bail!("--max-k must be at least 1");
        }
        let llm_defaults = LlmConfig::default();
        let llm = LlmConfig {
            endpoint_url: args.llm_endpoint.unwrap_or_default(),
            model_id: args.llm_model.unwrap_or(llm_defaults.model_id),
            temperature: args.llm_temperature.unwrap_or(llm_defaults.temperature),
            max_tokens: args.llm_max_tokens.unwrap_or(llm_defaults.max_tokens),
            timeout_ms: args.llm_timeout_ms.unwrap_or(llm_defaults.timeout_ms),
            api_key_env: args.llm_api_key_env.unwrap_or(llm_defaults.api_key_env),
            max_retries: args.llm_retries.unwrap_or(llm_defaults.max_retries),
        };
        let max_loop_iters = args.max_iters.unwrap_or(8);
        if max_loop_iters == 0 {
            bail!("--max-iters must be at least 1");
        }
        Ok(RunConfig {
            design_path,
            assertion_paths: args.assert,
            lemma_paths: args.lemmas,
            targets: args.target,
            spec_path: args.spec,
            cti_path: args.cti,
            bmc_depth: engine.bmc_depth,
            engine,
            suggester: args.suggester.unwrap_or(Suggester::Templates),
            flow: args.flow.unwrap_or(FlowArg::B).into(),
            llm,
            prompt_dir: args.prompt_dir.unwrap_or_else(|| PathBuf::from("prompts")),
            review: args.review,
            max_loop_iters,
            max_candidates: args.max_candidates.unwrap_or(32),
            max_states: args.max_states.unwrap_or(1 << 22),
            output_dir: args.out,
            json: args.json,
        })
    }

    /// Whether the language model will be called.
    pub fn uses_llm(&self) -> bool {
        matches!(self.suggester, Suggester::Llm | Suggester::Both)
    }
}
