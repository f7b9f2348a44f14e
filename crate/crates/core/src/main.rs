use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use chekprop::analyzer::{self, Analyzer, HarnessOptions, OutcomeClass};
use chekprop::bundle::load_bundle;
use chekprop::corpus::{self, FaultSpec};
use chekprop::evalkit::{self, Level, MappingTable, PartitionScheme, QualityTable};
use chekprop::fixtures::{self, FixtureStatus};
use chekprop::guardrail::{self, GuardFile, MonitorMode, MonitorPolicy};
use chekprop::llmclient::{extract_test_sources, PbtSource, Provider, ProviderConfig, ProviderKind};
use chekprop::orchestrator::{self, LoopConfig, Session};

/// Like `println!` but a closed stdout (e.g. `| head`) is not a panic.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Exit codes besides 0 (success) and 2 (usage, from clap).
mod code {
    pub const CONFIG: u8 = 2;
    pub const BUNDLE: u8 = 10;
    pub const PROVIDER: u8 = 11;
    pub const ANALYZER: u8 = 12;
    pub const OUTPUT: u8 = 13;
    pub const WARNED: u8 = 20;
    pub const BLOCKED: u8 = 21;
    pub const GUARD: u8 = 22;
    pub const EVAL: u8 = 30;
    pub const FIXTURES: u8 = 40;
}

#[derive(Debug)]
struct CliError {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> CliError {
    CliError { code, msg: msg.to_string() }
}

type CmdResult = Result<u8, CliError>;

#[derive(Parser)]
#[command(name = "chekprop", version, about = "Property-based test generation and runtime guards for CPS programs")]
struct Cli {
    /// TOML config file; flags override it, it overrides the environment.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate PBTs for a subject bundle.
    Generate(GenerateArgs),
    /// Run a subject scenario under guards compiled from a PBT or read from a guard file.
    Guard(GuardArgs),
    /// Reproduce relevance, executability or effectiveness measurements.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Verify, seal or record test fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCmd),
    /// Run one test file through the analyzer and print its outcome.
    RunPbt(RunPbtArgs),
    /// Print a healthy (or faulted) scenario trace as JSON lines.
    Simulate(SimulateArgs),
    #[command(hide = true)]
    Harness(HarnessArgs),
}

#[derive(Args, Clone, Default)]
struct ProviderFlags {
    #[arg(long, value_parser = ["live", "replay", "scripted"])]
    provider: Option<String>,
    /// Replay fixture directory.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Response files for the scripted provider, in order.
    #[arg(long = "response")]
    responses: Vec<PathBuf>,
    #[arg(long)]
    max_attempts: Option<u32>,
    /// Per-test analyzer timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Seed for the analyzer's input generation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    p: ProviderFlags,
}

#[derive(Args)]
struct GuardArgs {
    #[arg(long)]
    subject: String,
    /// PBT source to compile guards from.
    #[arg(long, conflicts_with = "guards", required_unless_present = "guards")]
    pbt: Option<PathBuf>,
    /// Guard file to use as is.
    #[arg(long)]
    guards: Option<PathBuf>,
    #[arg(long, default_value = "warn")]
    policy: MonitorMode,
    #[arg(long, default_value_t = 40)]
    ticks: u32,
    #[arg(long)]
    fault: Option<FaultSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum EvalCmd {
    Relevance {
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Executability {
        /// Quality table listing PBTs and patches.
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Effectiveness {
        #[arg(long, conflicts_with_all = ["pbt", "partitions"])]
        table: Option<PathBuf>,
        #[arg(long, requires_all = ["partitions", "subject"])]
        pbt: Option<PathBuf>,
        #[arg(long)]
        partitions: Option<PathBuf>,
        #[arg(long)]
        subject: Option<String>,
        #[arg(long, default_value_t = 200)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Check every manifest checksum.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Rewrite manifest checksums from the files on disk.
    Seal {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run a generation session and store every exchange as a replay fixture.
    Record {
        #[arg(long)]
        bundle: PathBuf,
        /// Directory receiving the recorded fixtures.
        #[arg(long = "into")]
        into: PathBuf,
        #[command(flatten)]
        p: ProviderFlags,
    },
}

#[derive(Args)]
struct RunPbtArgs {
    #[arg(long)]
    subject: String,
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    subject: String,
    #[arg(long, default_value_t = 40)]
    ticks: u32,
    #[arg(long)]
    fault: Option<FaultSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long)]
    subject: String,
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    result: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_examples: Option<u32>,
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long)]
    measure: bool,
}

/// Config file contents. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    provider: Option<ProviderConfig>,
    max_attempts: Option<u32>,
    timeout: Option<f64>,
    seed: Option<u64>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let path = match path {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os("CHEKPROP_CONFIG") {
            Some(p) => PathBuf::from(p),
            None => return Ok(FileConfig::default()),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|e| fail(code::CONFIG, format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| fail(code::CONFIG, format!("{}: {}", path.display(), e.message())))
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
    match std::env::var(name) {
        Ok(v) => v.parse().map(Some).map_err(|_| fail(code::CONFIG, format!("{name}: cannot parse '{v}'"))),
        Err(_) => Ok(None),
    }
}

struct Resolved {
    provider: Provider,
    cfg: LoopConfig,
    analyzer: Analyzer,
}

/// Applies flags over the config file over the environment.
fn resolve(p: &ProviderFlags, file: FileConfig) -> Result<Resolved, CliError> {
    let kind: Option<ProviderKind> = match &p.provider {
        Some(k) => Some(k.parse().map_err(|e| fail(code::CONFIG, e))?),
        None => file.provider.as_ref().map(|c| c.provider).map_or_else(|| env_parse("CHEKPROP_PROVIDER"), |k| Ok(Some(k)))?,
    };
    let kind = kind.unwrap_or(ProviderKind::Replay);
    let mut pc = match file.provider {
        Some(c) if c.provider == kind => c,
        Some(c) => ProviderConfig { provider: kind, ..c },
        None => ProviderConfig::new(kind),
    };
    if let Some(dir) = &p.fixtures {
        pc.fixture_dir = Some(dir.clone());
    } else if pc.fixture_dir.is_none() {
        pc.fixture_dir = env_parse::<PathBuf>("CHEKPROP_FIXTURES")?;
    }
    let max_attempts = p
        .max_attempts
        .or(file.max_attempts)
        .map_or_else(|| env_parse("CHEKPROP_MAX_ATTEMPTS"), |v| Ok(Some(v)))?
        .unwrap_or(orchestrator::DEFAULT_MAX_ATTEMPTS);
    let timeout = p
        .timeout
        .or(file.timeout)
        .map_or_else(|| env_parse("CHEKPROP_TIMEOUT"), |v| Ok(Some(v)))?
        .unwrap_or(analyzer::DEFAULT_TIMEOUT_SECS);
    let seed = p.seed.or(file.seed).map_or_else(|| env_parse("CHEKPROP_SEED"), |v| Ok(Some(v)))?.unwrap_or(0);

    let provider = if kind == ProviderKind::Scripted {
        let texts = p
            .responses
            .iter()
            .map(|f| std::fs::read_to_string(f).map_err(|e| fail(code::CONFIG, format!("{}: {e}", f.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        Provider::scripted(texts)
    } else {
        Provider::from_config(&pc).map_err(|e| fail(code::PROVIDER, e))?
    };
    let mut analyzer = make_analyzer(Some(timeout))?;
    analyzer.seed = seed;
    Ok(Resolved { provider, cfg: LoopConfig { max_attempts, timeout, provider: pc }, analyzer })
}

fn make_analyzer(timeout: Option<f64>) -> Result<Analyzer, CliError> {
    let a = Analyzer::current().map_err(|e| fail(code::ANALYZER, e))?;
    match timeout {
        Some(t) => a.with_timeout(t).map_err(|e| fail(code::CONFIG, e)),
        None => Ok(a),
    }
}

fn run_session(bundle: &Path, r: &Resolved) -> Result<Session, CliError> {
    let b = load_bundle(bundle).map_err(|e| fail(code::BUNDLE, e))?;
    orchestrator::generate_pbts(&b, &r.cfg, &r.provider, &r.analyzer).map_err(|e| match e {
        orchestrator::OrchestratorError::Provider { source, transcript } => {
            fail(code::PROVIDER, format!("{source} (after {} messages)", transcript.len()))
        }
        orchestrator::OrchestratorError::Analyzer(e) => fail(code::ANALYZER, e),
        e @ orchestrator::OrchestratorError::Io { .. } => fail(code::OUTPUT, e),
    })
}

fn summarize(s: &Session) {
    let verified = s.verified().count();
    out!(
        "{}: {} PBTs, {verified} verified, {} unresolved, {} LLM calls",
        s.subject_id,
        s.pbts.len(),
        s.pbts.len() - verified,
        s.llm_calls
    );
    for p in &s.pbts {
        let status = match p.status {
            orchestrator::PbtStatus::Verified => "verified",
            orchestrator::PbtStatus::Unresolved => "unresolved",
        };
        out!("  {:<48} {status:<10} attempts={} {}", p.pbt_id, p.attempts_used, p.final_report.outcome.class);
    }
    if let Some(r) = &s.no_test {
        out!("  no test produced: {}", r.outcome.message);
    }
}

fn cmd_generate(a: GenerateArgs, file: FileConfig) -> CmdResult {
    let r = resolve(&a.p, file)?;
    let session = run_session(&a.bundle, &r)?;
    orchestrator::write_session(&session, &a.out).map_err(|e| fail(code::OUTPUT, e))?;
    summarize(&session);
    Ok(0)
}

fn read_file(path: &Path, code: u8) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| fail(code, format!("{}: {e}", path.display())))
}

/// The test in a standalone PBT file, with its property comment.
fn pbt_from_file(path: &Path) -> Result<PbtSource, CliError> {
    let text = read_file(path, code::GUARD)?;
    let stem = path.file_stem().map_or_else(|| "pbt".to_string(), |s| s.to_string_lossy().into_owned());
    let property = extract_test_sources(&format!("```python\n{text}\n```"))
        .ok()
        .and_then(|v| v.into_iter().find_map(|s| s.property));
    Ok(PbtSource { name: stem, source: text, property })
}

fn cmd_guard(a: GuardArgs) -> CmdResult {
    let guards = match (&a.pbt, &a.guards) {
        (Some(p), _) => {
            let src = pbt_from_file(p)?;
            let report = make_analyzer(a.timeout)?.run_pbt(&src, &a.subject, 0).map_err(|e| fail(code::ANALYZER, e))?;
            if !report.passed() {
                return Err(fail(
                    code::GUARD,
                    format!("{}: PBT is not verified ({}): {}", p.display(), report.outcome.class, report.outcome.message),
                ));
            }
            // Files written by `generate` are already named `<subject>-<test>`.
            let id = if src.name.starts_with(&format!("{}-", a.subject)) {
                src.name.clone()
            } else {
                format!("{}-{}", a.subject, src.name)
            };
            let property = src.property.clone().unwrap_or_else(|| src.name.clone());
            guardrail::compile_source(&id, &property, &src.source, &a.subject).map_err(|e| fail(code::GUARD, e))?
        }
        (None, Some(g)) => {
            let f = GuardFile::load(g).map_err(|e| fail(code::GUARD, e))?;
            if f.subject_id != a.subject {
                return Err(fail(code::GUARD, format!("guard file is for '{}', not '{}'", f.subject_id, a.subject)));
            }
            f.guards
        }
        (None, None) => unreachable!("clap requires one of --pbt and --guards"),
    };
    let policy = MonitorPolicy { mode: a.policy };
    let run = guardrail::run_monitored(&a.subject, &guards, policy, a.ticks, a.fault.as_ref(), a.seed)
        .map_err(|e| fail(code::GUARD, e))?;
    std::fs::create_dir_all(&a.out).map_err(|e| fail(code::OUTPUT, format!("{}: {e}", a.out.display())))?;
    let out = |e: guardrail::GuardError| fail(code::OUTPUT, e);
    GuardFile { subject_id: a.subject.clone(), guards: guards.clone() }.save(&a.out.join("guards.json")).map_err(out)?;
    guardrail::write_jsonl(&a.out.join("trace.jsonl"), &run.trace).map_err(out)?;
    guardrail::write_jsonl(&a.out.join("events.jsonl"), &run.events).map_err(out)?;

    for g in &guards {
        let cs: Vec<String> = g.constraints.iter().map(ToString::to_string).collect();
        out!("guard {}: {}", g.guard_id, cs.join(" and "));
    }
    for e in &run.events {
        let action = match e.action {
            guardrail::AlertAction::Warned => "warned",
            guardrail::AlertAction::Blocked => "blocked",
        };
        out!("tick {} {action} {}: {}", e.tick, e.guard_id, e.detail);
    }
    let (status, code) = if run.events.is_empty() {
        ("clean", 0)
    } else if run.blocked() {
        ("blocked", code::BLOCKED)
    } else {
        ("warned", code::WARNED)
    };
    out!("{status}: {} ticks, {} events", run.trace.len(), run.events.len());
    Ok(code)
}

fn write_report(out: Option<&Path>, name: &str, value: &impl serde::Serialize) -> Result<(), CliError> {
    let Some(dir) = out else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| fail(code::OUTPUT, format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    std::fs::write(&path, text).map_err(|e| fail(code::OUTPUT, format!("{}: {e}", path.display())))
}

fn print_counts(counts: &std::collections::BTreeMap<Level, usize>, total: usize) {
    for level in [Level::High, Level::Med, Level::Low] {
        let n = counts[&level];
        out!("{level:<4} {n}/{total} ({:.1}%)", 100.0 * n as f64 / total.max(1) as f64);
    }
}

fn cmd_eval(cmd: EvalCmd) -> CmdResult {
    let ev = |e: evalkit::EvalError| fail(code::EVAL, e);
    match cmd {
        EvalCmd::Relevance { mapping, out } => {
            let table = MappingTable::load(&mapping).map_err(ev)?;
            let r = evalkit::compute_relevance(&table).map_err(ev)?;
            let c = r.counts;
            out!(
                "groups: exact={} equivalent={} extracted_only={} groundtruth_only={}",
                c.exact, c.equivalent, c.extracted_only, c.groundtruth_only
            );
            out!("precision {}", r.precision);
            out!("recall {}", r.recall);
            write_report(out.as_deref(), "relevance.json", &evalkit::EvalReport { relevance: Some(r), ..Default::default() })?;
        }
        EvalCmd::Executability { table, timeout, out } => {
            let t = QualityTable::load(&table).map_err(ev)?;
            let rows = evalkit::table_executability(&t, &make_analyzer(timeout)?).map_err(ev)?;
            for r in &rows {
                let how = if r.measured { "" } else { " [recorded]" };
                out!("{:<6} {:<24} {:<4} {}{how}", r.property_id, r.program, r.result, r.note);
            }
            print_counts(&evalkit::level_counts(rows.iter().map(|r| &r.result)), rows.len());
            let report = evalkit::EvalReport {
                executability: rows.iter().map(|r| (r.property_id.clone(), r.result)).collect(),
                ..Default::default()
            };
            write_report(out.as_deref(), "executability.json", &report)?;
        }
        EvalCmd::Effectiveness { table, pbt, partitions, subject, samples, seed, out } => {
            let mut analyzer = make_analyzer(None)?;
            analyzer.seed = seed;
            let rows = match (table, pbt) {
                (Some(t), _) => {
                    let t = QualityTable::load(&t).map_err(ev)?;
                    evalkit::table_effectiveness(&t, samples, &analyzer).map_err(ev)?
                }
                (None, Some(p)) => {
                    let scheme = PartitionScheme::load(partitions.as_deref().expect("clap requires partitions")).map_err(ev)?;
                    let src = pbt_from_file(&p).map_err(|e| fail(code::EVAL, e.msg))?;
                    let subject = subject.expect("clap requires subject");
                    let e = evalkit::measure_effectiveness(&src, &subject, &scheme, samples, &analyzer).map_err(ev)?;
                    vec![evalkit::RowOutcome {
                        property_id: src.name.clone(),
                        program: subject,
                        note: format!("{}/{} cells", e.cells_hit, e.cells_total),
                        result: e,
                        measured: true,
                    }]
                }
                (None, None) => return Err(fail(code::CONFIG, "give --table, or --pbt with --partitions and --subject")),
            };
            for r in &rows {
                let how = if r.measured { "" } else { " [recorded]" };
                out!("{:<6} {:<24} {:<4} {}{how}", r.property_id, r.program, r.result.level, r.note);
            }
            print_counts(&evalkit::level_counts(rows.iter().map(|r| &r.result.level)), rows.len());
            let report = evalkit::EvalReport {
                effectiveness: rows.iter().map(|r| (r.property_id.clone(), r.result.clone())).collect(),
                ..Default::default()
            };
            write_report(out.as_deref(), "effectiveness.json", &report)?;
        }
    }
    Ok(0)
}

fn cmd_fixtures(cmd: FixturesCmd, file: FileConfig) -> CmdResult {
    match cmd {
        FixturesCmd::Verify { manifest } => {
            let report = fixtures::verify_fixtures(&manifest).map_err(|e| fail(code::FIXTURES, e))?;
            let mut bad = 0;
            for (id, st) in &report {
                out!("{id}: {st}");
                bad += usize::from(*st != FixtureStatus::Ok);
            }
            out!("{} entries, {bad} problems", report.len());
            Ok(if bad == 0 { 0 } else { code::FIXTURES })
        }
        FixturesCmd::Seal { manifest } => {
            let missing = fixtures::seal_fixtures(&manifest).map_err(|e| fail(code::FIXTURES, e))?;
            for id in &missing {
                out!("{id}: missing");
            }
            Ok(if missing.is_empty() { 0 } else { code::FIXTURES })
        }
        FixturesCmd::Record { bundle, into, p } => {
            let mut r = resolve(&p, file)?;
            std::fs::create_dir_all(&into).map_err(|e| fail(code::OUTPUT, format!("{}: {e}", into.display())))?;
            r.provider = Provider::Recording { inner: Box::new(r.provider), dir: into };
            let session = run_session(&bundle, &r)?;
            summarize(&session);
            Ok(0)
        }
    }
}

fn cmd_run_pbt(a: RunPbtArgs) -> CmdResult {
    let src = pbt_from_file(&a.file).map_err(|e| fail(code::ANALYZER, e.msg))?;
    let mut analyzer = make_analyzer(a.timeout)?;
    analyzer.seed = a.seed;
    let r = analyzer.run_pbt(&src, &a.subject, 0).map_err(|e| fail(code::ANALYZER, e))?;
    out!("{}", r.outcome.class);
    if !r.outcome.message.is_empty() {
        out!("{}", r.outcome.message);
    }
    Ok(u8::try_from(r.outcome.class.exit_code()).unwrap_or(1))
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let err = |e: corpus::CorpusError| fail(code::CONFIG, e);
    let mut sc = corpus::scenario_for(&a.subject, a.ticks, a.seed).map_err(err)?;
    if let Some(f) = a.fault {
        sc = corpus::inject_fault(sc, f).map_err(err)?;
    }
    for rec in corpus::run_unmonitored(sc.as_mut()) {
        out!("{}", serde_json::to_string(&rec).expect("record serializes"));
    }
    Ok(0)
}

fn cmd_harness(a: HarnessArgs) -> CmdResult {
    let result = match std::fs::read_to_string(&a.file) {
        Ok(src) => {
            let opts = HarnessOptions {
                seed: a.seed,
                max_examples: a.max_examples,
                record: a.record,
                measure: a.measure,
                ..HarnessOptions::new(&a.subject)
            };
            analyzer::run_harness(&src, &opts)
        }
        Err(e) => analyzer::HarnessResult {
            class: OutcomeClass::CollectionError,
            message: format!("{}: {e}", a.file.display()),
            tests: Vec::new(),
            examples: 0,
            stdout: String::new(),
        },
    };
    let _ = write!(std::io::stdout(), "{}", result.stdout);
    let json = serde_json::to_string(&result).expect("result serializes");
    std::fs::write(&a.result, json).map_err(|e| fail(code::OUTPUT, format!("{}: {e}", a.result.display())))?;
    Ok(u8::try_from(result.class.exit_code()).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = load_config(cli.config.as_deref()).and_then(|file| match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a, file),
        Cmd::Guard(a) => cmd_guard(a),
        Cmd::Eval(c) => cmd_eval(c),
        Cmd::Fixtures(c) => cmd_fixtures(c, file),
        Cmd::RunPbt(a) => cmd_run_pbt(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Harness(a) => cmd_harness(a),
    });
    match outcome {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
