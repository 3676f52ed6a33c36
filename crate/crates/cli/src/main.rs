// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use scvd::ast::{parse_source_unit, to_json, FileId};
use scvd::backend::{make_backend, BackendConfig, BackendKind};
use scvd::context::{bundle_to_json, extract_context, ContextBundle, DEFAULT_DEPTH};
use scvd::eval::{
    compute_metrics, load_manifest, render_report, run_eval, sample_instances, EvalError,
    PipelineConfig, Stage,
};
use scvd::project::{load_project, FilterConfig, FunctionRef, ProjectModel, VulnCategory};
use scvd::prompt::{
    assemble_prompt_with, load_example_store, AssembledPrompt, ExampleStore, PromptOptions,
    DEFAULT_BUDGET,
};

const EXIT_VULNERABLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BACKEND: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "scvd", version, about = "Smart contract vulnerability detection pipeline")]
struct Cli {
    /// TOML file with backend settings (kind, endpoint, model, timeout_secs,
    /// max_retries, temperature, retry_base_ms, max_concurrency)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Log debug output to stderr
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse one Solidity file
    Parse {
        file: PathBuf,
        /// Print the syntax tree as JSON
        #[arg(long)]
        json: bool,
    },
    /// Print the context bundle of a target function as JSON
    Extract(TargetArgs),
    /// Print the assembled prompt for a target function
    Prompt {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        prompt: PromptArgs,
        /// Print the prompt with its sections and truncation log as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run a backend on a target function and print the verdict as JSON
    Detect {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        prompt: PromptArgs,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
    },
    /// Evaluate a labeled manifest and write a metrics report
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Llm,
    Rules,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Llm => BackendKind::Llm,
            BackendArg::Rules => BackendKind::Rules,
        }
    }
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Project root directory
    #[arg(long, value_name = "DIR")]
    project: PathBuf,
    #[arg(long)]
    contract: String,
    #[arg(long)]
    function: String,
    /// Parameter types, e.g. `uint256,address`; needed for overloads
    #[arg(long, value_name = "SIG")]
    signature: Option<String>,
    /// Vulnerability category id, e.g. `reentrancy`
    #[arg(long, value_name = "CAT")]
    category: VulnCategory,
    /// Callstack depth
    #[arg(long, value_name = "N", default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[command(flatten)]
    filter: FilterArgs,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Extra exclusion glob, relative to the project root (repeatable)
    #[arg(long, value_name = "GLOB")]
    exclude: Vec<String>,
}

impl FilterArgs {
    fn config(&self, root: &Path) -> Result<FilterConfig, Failure> {
        let mut filter = FilterConfig::for_project(root).map_err(Failure::usage)?;
        for glob in &self.exclude {
            filter = filter.with_exclude(glob.clone());
        }
        Ok(filter)
    }
}

#[derive(Debug, Args)]
struct PromptArgs {
    /// Token budget for the assembled prompt
    #[arg(long, value_name = "TOKENS", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Example store directory instead of the bundled one
    #[arg(long, value_name = "DIR")]
    prompts: Option<PathBuf>,
    /// Assemble even when the store has no examples for the category
    #[arg(long)]
    allow_zero_shot: bool,
}

impl PromptArgs {
    fn options(&self) -> PromptOptions {
        PromptOptions {
            budget: self.budget,
            allow_zero_shot: self.allow_zero_shot,
        }
    }

    fn store(&self) -> Result<ExampleStore, Failure> {
        match &self.prompts {
            Some(dir) => load_example_store(dir).map_err(Failure::usage),
            None => Ok(ExampleStore::bundled()),
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// JSONL dataset manifest
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Category id, or `all` for every category with positives
    #[arg(long, value_name = "CAT|all")]
    category: String,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Negatives drawn per positive, in [1, 2]
    #[arg(long, value_name = "R", default_value_t = 2.0)]
    neg_ratio: f64,
    /// Cap on positives per category
    #[arg(long, value_name = "K")]
    max_pos: Option<usize>,
    /// Directory for report.md, report.json, records.jsonl and errors.jsonl
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Callstack depth
    #[arg(long, value_name = "N", default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[command(flatten)]
    prompt: PromptArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Print report.json instead of the markdown table
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Backend(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn backend(e: impl ToString) -> Self {
        Failure::Backend(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .target(env_logger::Target::Stderr)
        .init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Backend(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_BACKEND)
        }
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(Failure::usage)
}

fn emit_json(value: &Value) -> Result<(), Failure> {
    emit(&serde_json::to_string_pretty(value).expect("json values serialize"))
}

fn backend_config(cli: &Cli, kind: Option<BackendArg>) -> Result<BackendConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => BackendConfig::load(path).map_err(Failure::usage)?,
        None => BackendConfig::default(),
    }
    .with_env();
    if let Some(kind) = kind {
        config.kind = kind.into();
    }
    config.validate().map_err(Failure::usage)?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Parse { file, json } => parse(file, *json),
        Command::Extract(target) => {
            let (_, _, bundle) = extract(target)?;
            emit(&bundle_to_json(&bundle))?;
            Ok(0)
        }
        Command::Prompt {
            target,
            prompt,
            json,
        } => {
            let (_, _, bundle) = extract(target)?;
            let assembled = assemble(target, prompt, &bundle)?;
            if *json {
                emit_json(&serde_json::to_value(&assembled).expect("prompt serializes"))?;
            } else {
                emit(&assembled.text)?;
            }
            Ok(0)
        }
        Command::Detect {
            target,
            prompt,
            backend,
        } => {
            let config = backend_config(cli, *backend)?;
            let (model, function, bundle) = extract(target)?;
            let assembled = assemble(target, prompt, &bundle)?;
            let backend = make_backend(&config).map_err(Failure::usage)?;
            let verdict = backend
                .detect(target.category, &assembled, &model, &function)
                .map_err(Failure::backend)?;
            emit_json(&serde_json::to_value(&verdict).expect("verdict serializes"))?;
            Ok(if verdict.is_vulnerable { EXIT_VULNERABLE } else { 0 })
        }
        Command::Eval(args) => eval(cli, args),
    }
}

fn parse(file: &Path, json: bool) -> Result<u8, Failure> {
    let source = fs::read_to_string(file).map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    let unit = parse_source_unit(&source, &file.display().to_string(), FileId(0)).map_err(Failure::usage)?;
    if json {
        emit_json(&to_json(&unit))?;
    } else {
        let mut text = format!("{}: ok\n", file.display());
        for c in &unit.contracts {
            text += &format!(
                "  {} ({} functions, {} modifiers, {} state variables)\n",
                c.name,
                c.functions.len(),
                c.modifiers.len(),
                c.state_variables.len()
            );
        }
        emit(&text)?;
    }
    Ok(0)
}

fn extract(target: &TargetArgs) -> Result<(ProjectModel, FunctionRef, ContextBundle), Failure> {
    let filter = target.filter.config(&target.project)?;
    let model = load_project(&target.project, &filter).map_err(Failure::usage)?;
    for d in &model.diagnostics {
        log::warn!("{}: {}", d.path, d.message);
    }
    let function = model
        .find_function(&target.contract, &target.function, target.signature.as_deref())
        .map_err(Failure::usage)?;
    let bundle =
        extract_context(&model, &function, target.category, target.depth).map_err(Failure::usage)?;
    Ok((model, function, bundle))
}

fn assemble(
    target: &TargetArgs,
    args: &PromptArgs,
    bundle: &ContextBundle,
) -> Result<AssembledPrompt, Failure> {
    let store = args.store()?;
    let prompt = assemble_prompt_with(target.category, bundle, &store, &args.options())
        .map_err(Failure::usage)?;
    for d in &prompt.dropped {
        log::info!("dropped {}{}", d.field, d.item.as_deref().map(|i| format!(" ({i})")).unwrap_or_default());
    }
    Ok(prompt)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn eval(cli: &Cli, args: &EvalArgs) -> Result<u8, Failure> {
    let backend = backend_config(cli, args.backend)?;
    let manifest = load_manifest(&args.manifest).map_err(Failure::usage)?;
    let categories: Vec<VulnCategory> = if args.category == "all" {
        VulnCategory::ALL.to_vec()
    } else {
        vec![args.category.parse().map_err(Failure::usage)?]
    };
    let mut pipeline = PipelineConfig::new(backend);
    pipeline.filter = FilterConfig::default();
    for glob in &args.filter.exclude {
        pipeline.filter = pipeline.filter.clone().with_exclude(glob.clone());
    }
    pipeline.depth = args.depth;
    pipeline.prompt = args.prompt.options();
    pipeline.store = args.prompt.store()?;

    let mut rows = BTreeMap::new();
    let mut runs = serde_json::Map::new();
    let mut records = String::new();
    let mut errors = String::new();
    let (mut scored, mut backend_failures) = (0, 0);
    for category in categories {
        let set = match sample_instances(&manifest, category, args.seed, args.neg_ratio, args.max_pos) {
            Ok(set) => set,
            Err(EvalError::NoPositives(_)) if args.category == "all" => continue,
            Err(e) => return Err(Failure::usage(e)),
        };
        for w in &set.warnings {
            log::warn!("{w}");
        }
        let run = run_eval(&set, &pipeline);
        scored += run.records.len();
        backend_failures += run.errors.iter().filter(|e| e.stage == Stage::Detect).count();
        for r in &run.records {
            records += &(serde_json::to_string(r).expect("record serializes") + "\n");
        }
        for e in &run.errors {
            errors += &(serde_json::to_string(e).expect("error serializes") + "\n");
        }
        runs.insert(
            category.id().to_string(),
            json!({
                "positives": set.positives,
                "negatives": set.negatives,
                "matrix": run.matrix,
                "errors": run.errors.len(),
                "warnings": set.warnings,
            }),
        );
        rows.insert(category, compute_metrics(&run.matrix));
    }
    if rows.is_empty() {
        return Err(Failure::usage("no category in the manifest has positive instances"));
    }
    let report = render_report(&rows);
    let mut json = report.json.clone();
    json["seed"] = json!(args.seed);
    json["neg_ratio"] = json!(args.neg_ratio);
    json["runs"] = Value::Object(runs);

    fs::create_dir_all(&args.out).map_err(|e| Failure::usage(format!("{}: {e}", args.out.display())))?;
    let json_text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
    write_file(&args.out, "report.md", &report.markdown)?;
    write_file(&args.out, "report.json", &json_text)?;
    write_file(&args.out, "records.jsonl", &records)?;
    write_file(&args.out, "errors.jsonl", &errors)?;
    if args.json {
        emit(&json_text)?;
    } else {
        emit(&report.markdown)?;
    }
    if scored == 0 && backend_failures > 0 {
        return Err(Failure::backend(format!(
            "the backend failed on all {backend_failures} instances that reached it; see errors.jsonl"
        )));
    }
    Ok(0)
}
