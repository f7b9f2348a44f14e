//! End-to-end acceptance suite. Runs without a network: every LLM response
//! comes from the shipped replay fixtures or a scripted provider.
//!
//! Prints one `PASS`/`FAIL` line per criterion and exits non-zero if any
//! criterion fails.

use std::any::Any;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chekprop::analyzer::{run_harness, Analyzer, HarnessOptions, OutcomeClass};
use chekprop::bundle::load_bundle;
use chekprop::corpus::{
    inject_fault, pcs::SPEED, run_unmonitored, scenario_for, FaultSpec, PcsConfig, Record, Scalar, TcsConfig,
};
use chekprop::evalkit::{self, Level, PartitionScheme, QualityTable};
use chekprop::guardrail::{compile_source, AlertAction, Bound, Constraint, GuardChecker, MonitorMode, MonitorPolicy};
use chekprop::llmclient::{extract_test_sources, Provider, ProviderConfig, ProviderKind};
use chekprop::orchestrator::{generate_pbts, ledger_of, LoopConfig, PbtStatus};
use chekprop::promptkit::Role;
use chekprop::{Pcs, Tcs};
use pbtlang::{Exc, Interpreter, NativeObject, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(rel: &str) -> PathBuf {
    root().join("fixtures").join(rel)
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chekprop")
}

fn analyzer() -> Analyzer {
    Analyzer::new(bin())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs()))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    ensure(out.status.success(), || format!("chekprop {}: {}\n{}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr)))?;
    Ok(stdout)
}

// ------------------------------------------------------------ 1

fn relevance() -> Outcome {
    let start = Instant::now();
    let table = fixture("mapping/properties.csv");
    let out = run_cli(&["eval", "relevance", "--mapping", table.to_str().unwrap()])?;
    within(start, Duration::from_secs(1))?;

    // Oracle: count the group column directly.
    let mut groups: BTreeMap<String, u32> = BTreeMap::new();
    let mut rdr = csv::Reader::from_path(&table).map_err(|e| e.to_string())?;
    for row in rdr.records() {
        let row = row.map_err(|e| e.to_string())?;
        *groups.entry(row[4].to_string()).or_default() += 1;
    }
    let g = |k: &str| f64::from(groups.get(k).copied().unwrap_or(0));
    let matched = g("exact_match") + g("equivalent_match");
    let precision = matched / (matched + g("extracted_only"));
    let recall = matched / (matched + g("groundtruth_only"));
    ensure((precision - 0.72).abs() < 1e-12, || format!("oracle precision {precision}"))?;
    ensure((recall - 0.9474).abs() < 1e-4, || format!("oracle recall {recall}"))?;

    let line = |name: &str| out.lines().find(|l| l.starts_with(name)).unwrap_or("").to_string();
    let (p, r) = (line("precision"), line("recall"));
    ensure(p.starts_with("precision 0.7200 "), || format!("printed '{p}'"))?;
    ensure(r.starts_with("recall 0.9474 "), || format!("printed '{r}'"))?;
    Ok(format!("{p}, {r}"))
}

// ------------------------------------------------------------ 2

fn executability() -> Outcome {
    let start = Instant::now();
    let table = QualityTable::load(&fixture("quality/table.toml")).map_err(|e| e.to_string())?;
    let rows = evalkit::table_executability(&table, &analyzer()).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(60))?;
    let counts = evalkit::level_counts(rows.iter().map(|r| &r.result));
    let (h, m, l) = (counts[&Level::High], counts[&Level::Med], counts[&Level::Low]);
    ensure(rows.len() == 21, || format!("{} rows", rows.len()))?;
    ensure((h, m, l) == (10, 7, 4), || format!("{h} HIGH / {m} MED / {l} LOW"))?;
    Ok(format!("{h} HIGH / {m} MED / {l} LOW over {} rows", rows.len()))
}

// ------------------------------------------------------------ 3

fn cells_hit(source: &str, scheme: &PartitionScheme, seed: u64, dir: &Path) -> Result<usize, String> {
    let record = tempfile::NamedTempFile::new_in(dir).map_err(|e| e.to_string())?.into_temp_path();
    let opts = HarnessOptions {
        seed,
        max_examples: Some(200),
        record: Some(record.to_path_buf()),
        measure: true,
        ..HarnessOptions::new("tcs")
    };
    let r = run_harness(source, &opts);
    ensure(r.class == OutcomeClass::Pass, || format!("seed {seed}: {} {}", r.class, r.message))?;
    let text = std::fs::read_to_string(&record).map_err(|e| e.to_string())?;
    let inputs = evalkit::parse_recorded(&record, &text).map_err(|e| e.to_string())?;
    let e = evalkit::effectiveness_from_inputs("tcs", scheme, &inputs).map_err(|e| e.to_string())?;
    Ok(e.cells_hit)
}

fn effectiveness() -> Outcome {
    let start = Instant::now();
    let scheme = PartitionScheme::load(&root().join("subjects/tcs/partitions.toml")).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;

    let source = std::fs::read_to_string(fixture("effectiveness/tcs_initial_temp.py")).map_err(|e| e.to_string())?;
    let seeds = 1000u64;
    let mut full = 0u64;
    for seed in 0..seeds {
        if cells_hit(&source, &scheme, seed, dir.path())? == 5 {
            full += 1;
        }
    }
    // Uniform draws over 5 cells miss one with probability at most 5 (4/5)^200.
    let miss_bound = 5.0 * 0.8f64.powi(200);
    ensure(miss_bound < 1e-3, || format!("bound {miss_bound}"))?;
    ensure(full * 1000 >= seeds * 999, || format!("5/5 in {full}/{seeds} runs"))?;

    let constant = std::fs::read_to_string(fixture("effectiveness/tcs_constant.py")).map_err(|e| e.to_string())?;
    let hit = cells_hit(&constant, &scheme, 0, dir.path())?;
    let level = evalkit::effectiveness_level(hit, 5);
    ensure(level == Level::Low, || format!("constant generator is {level} ({hit}/5)"))?;

    let table = QualityTable::load(&fixture("quality/table.toml")).map_err(|e| e.to_string())?;
    let rows = evalkit::table_effectiveness(&table, 200, &analyzer()).map_err(|e| e.to_string())?;
    let high = rows.iter().filter(|r| r.result.level == Level::High).count();
    let pct = 100.0 * high as f64 / rows.len() as f64;
    ensure((high, rows.len()) == (18, 21), || format!("{high}/{} HIGH", rows.len()))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("5/5 in {full}/{seeds} seeds, constant {level} ({hit}/5), table {high}/{} HIGH = {pct:.1}%", rows.len()))
}

// ------------------------------------------------------------ 4

fn simulators() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sensor = f64::from(rng.gen_range(1..=3u8));
        let control = f64::from(rng.gen_range(1..=3u8));
        let total = f64::from(rng.gen_range(3..=50u8));
        let cfg = TcsConfig {
            total_time: total,
            sensor_interval: sensor,
            control_interval: control,
            initial_temp: Some(f64::from(rng.gen_range(15..=29u8))),
            seed,
        };
        let steps = Tcs::new(cfg.clone()).map_err(|e| e.to_string())?.run_detailed();
        let again = Tcs::new(cfg).map_err(|e| e.to_string())?.run_detailed();
        ensure(steps == again, || format!("tcs seed {seed}: replay differs"))?;
        for s in &steps {
            let (h, c) = (s.state.heater_value, s.state.cooler_value);
            ensure(!(h > 0.0 && c > 0.0), || format!("tcs seed {seed} tick {}: heater and cooler on", s.state.tick))?;
            let Some(t) = s.decided_on else {
                ensure(h == 0.0 && c == 0.0, || format!("tcs seed {seed}: actuation before any decision"))?;
                continue;
            };
            // Pr1/Pr2: heat below 21, cool above 23; Pr4: idle inside the band.
            let want = (t < 21.0, t > 23.0);
            ensure((h > 0.0, c > 0.0) == want, || {
                format!("tcs seed {seed} tick {}: sensed {t}, heater {h}, cooler {c}", s.state.tick)
            })?;
        }
        checked += steps.len();
    }

    let intervals = [0.25, 0.5, 1.0, 1.5, 2.0];
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || intervals[rng.gen_range(0..intervals.len())];
        let cfg = PcsConfig {
            cylinder_interval: pick(),
            controller_interval: pick(),
            mock_interval: pick(),
            total_time: f64::from(ChaCha8Rng::seed_from_u64(!seed).gen_range(1..=50u8)),
            seed,
        };
        let step = cfg.cylinder_interval * SPEED;
        let states = Pcs::new(cfg.clone()).map_err(|e| e.to_string())?.run();
        ensure(states == Pcs::new(cfg).map_err(|e| e.to_string())?.run(), || format!("pcs seed {seed}: replay differs"))?;
        let (mut a, mut b) = (0.0, 0.0);
        for s in &states {
            let ctx = || format!("pcs seed {seed} tick {}", s.tick);
            let (na, nb) = (s.cylinder_a_loc, s.cylinder_b_location);
            ensure((0.0..=2.0).contains(&na) && (0.0..=2.0).contains(&nb), || format!("{}: out of [0,2]", ctx()))?;
            ensure(!(s.a_moving && s.b_moving), || format!("{}: both moving", ctx()))?;
            ensure(!s.a_moving || nb == 0.0, || format!("{}: A moves with B at {nb}", ctx()))?;
            let (da, db): (f64, f64) = (na - a, nb - b);
            ensure(da.abs() <= step + 1e-12 && db.abs() <= step + 1e-12, || format!("{}: jump {da} {db}", ctx()))?;
            ensure(s.a_moving == (da != 0.0) && s.b_moving == (db != 0.0), || format!("{}: moving flags", ctx()))?;
            (a, b) = (na, nb);
        }
        checked += states.len();
    }
    within(start, Duration::from_secs(180))?;
    Ok(format!("2000 scenarios, {checked} states, 0 violations"))
}

// ------------------------------------------------------------ 5

fn classification() -> Outcome {
    #[derive(serde::Deserialize)]
    struct Expected {
        subject: String,
        timeout_secs: f64,
        cases: BTreeMap<String, OutcomeClass>,
    }
    let dir = fixture("failure_corpus");
    let text = std::fs::read_to_string(dir.join("expected.toml")).map_err(|e| e.to_string())?;
    let exp: Expected = toml::from_str(&text).map_err(|e| e.to_string())?;
    let a = analyzer().with_timeout(exp.timeout_secs).map_err(|e| e.to_string())?;
    let mut right = 0;
    let mut wrong = Vec::new();
    for (stem, want) in &exp.cases {
        let source = std::fs::read_to_string(dir.join(format!("{stem}.py"))).map_err(|e| e.to_string())?;
        let src = chekprop::llmclient::PbtSource { name: stem.clone(), source, property: None };
        let start = Instant::now();
        let r = a.run_pbt(&src, &exp.subject, 0).map_err(|e| e.to_string())?;
        if *want == OutcomeClass::Timeout {
            within(start, Duration::from_secs_f64(exp.timeout_secs + 2.0))?;
        }
        if r.outcome.class == *want {
            right += 1;
        } else {
            wrong.push(format!("{stem} -> {}", r.outcome.class));
        }
    }
    ensure(wrong.is_empty() && right == 6, || format!("{right}/{} correct; {}", exp.cases.len(), wrong.join(", ")))?;
    Ok(format!("{right}/6 classified"))
}

// ------------------------------------------------------------ 6

fn improvement_loop() -> Outcome {
    let bundle = load_bundle(&root().join("subjects/tcs/manifest.toml")).map_err(|e| e.to_string())?;
    let read = |f: &str| std::fs::read_to_string(fixture(f)).map_err(|e| e.to_string());
    let (broken, fixed) = (read("scripted/broken.md")?, read("scripted/fixed.md")?);
    let cfg = |n| LoopConfig { max_attempts: n, timeout: 30.0, ..LoopConfig::new(ProviderConfig::new(ProviderKind::Scripted)) };

    // Oracle for the error text: analyze the broken test on its own.
    let b = extract_test_sources(&broken).map_err(|_| "broken fixture has no test".to_string())?;
    let first = analyzer().run_pbt(&b[0], "tcs", 0).map_err(|e| e.to_string())?;
    ensure(!first.passed(), || "broken fixture passes".into())?;

    let s = generate_pbts(&bundle, &cfg(3), &Provider::scripted([broken.clone(), fixed]), &analyzer()).map_err(|e| e.to_string())?;
    let ledger = ledger_of(&s);
    let rows: Vec<_> = ledger.pbts.iter().map(|p| (p.status, p.attempts_used)).collect();
    ensure(rows == [(PbtStatus::Verified, 1)], || format!("ledger rows {rows:?}"))?;
    let msgs = s.transcript.messages();
    ensure(msgs.len() == 4 && msgs[2].role == Role::User, || format!("{} messages", msgs.len()))?;
    ensure(msgs[2].text.contains(&first.outcome.message), || {
        format!("improvement message lacks '{}'", first.outcome.message)
    })?;

    let s0 = generate_pbts(&bundle, &cfg(0), &Provider::scripted([broken]), &analyzer()).map_err(|e| e.to_string())?;
    let st: Vec<_> = s0.pbts.iter().map(|p| p.status).collect();
    ensure(st == [PbtStatus::Unresolved] && s0.llm_calls == 1, || format!("max_attempts=0 gave {st:?}"))?;
    Ok(format!("attempts_used=1 with '{}' quoted; max_attempts=0 unresolved", first.outcome.class))
}

// ------------------------------------------------------------ 7

/// Exposes a trace record to the oracle script as `state.<field>`.
struct StateView(Record);

impl NativeObject for StateView {
    fn type_name(&self) -> String {
        "SystemState".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        self.0.get(name).map(|v| {
            Ok(match v {
                Scalar::Bool(b) => Value::Bool(b),
                Scalar::Int(i) => Value::Int(i),
                Scalar::Float(f) => Value::Float(f),
            })
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// The assert statements of the PBT's state loop, run as-is on one record.
struct AssertOracle {
    interp: Interpreter,
    check: Value,
}

impl AssertOracle {
    fn new(pbt: &str) -> Result<Self, String> {
        let body: Vec<String> =
            pbt.lines().map(str::trim).filter(|l| l.starts_with("assert ")).map(|l| format!("    {l}")).collect();
        ensure(body.len() == 2, || format!("{} asserts in the PBT", body.len()))?;
        let src = format!("def check(state):\n{}\n", body.join("\n"));
        let mut interp = Interpreter::new();
        let scope = pbtlang::run_source(&mut interp, &src).map_err(|e| format!("{e:?}"))?;
        let check = scope.borrow().get("check").cloned().ok_or("no check function")?;
        Ok(Self { interp, check })
    }

    fn passes(&mut self, rec: &Record) -> Result<bool, String> {
        match self.interp.call(&self.check, vec![Value::native(StateView(rec.clone()))], Vec::new()) {
            Ok(_) => Ok(true),
            Err(e) if e.is_named("AssertionError") => Ok(false),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn guard_round_trip() -> Outcome {
    let pbt = std::fs::read_to_string(fixture("quality/pbts/pr07_cylinder_bounds.py")).map_err(|e| e.to_string())?;
    let guards = compile_source("pcs-pr07", "cylinder bounds", &pbt, "pcs").map_err(|e| e.to_string())?;
    let closed = |v| Some(Bound { value: v, closed: true });
    let want = ["cylinder_a_loc", "cylinder_b_location"]
        .map(|f| vec![Constraint::Interval { field: f.into(), lo: closed(0.0), hi: closed(2.0) }]);
    let got: Vec<_> = guards.iter().map(|g| g.constraints.clone()).collect();
    ensure(got == want, || format!("guards {got:?}"))?;

    let mut oracle = AssertOracle::new(&pbt)?;
    let mut checker = GuardChecker::new(guards.clone()).map_err(|e| e.to_string())?;
    let mut ticks = 0;
    for seed in 0..100 {
        let mut sc = scenario_for("pcs", 40, seed).map_err(|e| e.to_string())?;
        for rec in run_unmonitored(sc.as_mut()) {
            let by_guard = checker.violations(&rec).map_err(|e| e.to_string())?.is_empty();
            let by_pbt = oracle.passes(&rec)?;
            ensure(by_guard && by_pbt, || format!("seed {seed}: guard {by_guard}, pbt {by_pbt} on {rec:?}"))?;
            ticks += 1;
        }
    }
    // Faulted states exercise the failing side of the equivalence too.
    let fault: FaultSpec = "force:cylinder_a_loc=2.5@5".parse().map_err(|e| format!("{e}"))?;
    let mut sc = inject_fault(scenario_for("pcs", 40, 0).map_err(|e| e.to_string())?, fault.clone()).map_err(|e| e.to_string())?;
    for rec in run_unmonitored(sc.as_mut()) {
        let by_guard = checker.violations(&rec).map_err(|e| e.to_string())?.is_empty();
        ensure(by_guard == oracle.passes(&rec)?, || format!("disagreement on {rec:?}"))?;
    }

    let run = |mode| chekprop::guardrail::run_monitored("pcs", &guards, MonitorPolicy { mode }, 40, Some(&fault), 0);
    let warn = run(MonitorMode::Warn).map_err(|e| e.to_string())?;
    let ev: Vec<_> = warn.events.iter().map(|e| (e.tick, e.action)).collect();
    ensure(ev == [(5, AlertAction::Warned)], || format!("warn events {ev:?}"))?;
    let block = run(MonitorMode::Block).map_err(|e| e.to_string())?;
    let ev: Vec<_> = block.events.iter().map(|e| (e.tick, e.action)).collect();
    ensure(ev == [(5, AlertAction::Blocked)], || format!("block events {ev:?}"))?;
    let after = &block.trace[5];
    let stopped = after.get("a_moving") == Some(Scalar::Bool(false)) && after.get("b_moving") == Some(Scalar::Bool(false));
    ensure(stopped, || format!("after block: {after:?}"))?;
    Ok(format!("2 interval guards, agreement on {ticks} healthy states, warn/block at tick 5"))
}

// ------------------------------------------------------------ 8

fn read_tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap_or_default());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixtures = fixture("conversations");
    let mut files = 0;
    for subject in ["tcs", "pcs", "line_following_robot", "input_device"] {
        let manifest = root().join(format!("subjects/{subject}/manifest.toml"));
        let mut trees = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("{subject}-{run}"));
            run_cli(&[
                "generate",
                "--bundle",
                manifest.to_str().unwrap(),
                "--provider",
                "replay",
                "--fixtures",
                fixtures.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])?;
            trees.push(read_tree(&out));
        }
        let names: Vec<_> = trees[0].keys().filter_map(|p| p.to_str()).collect();
        for want in ["ledger.json", "transcript.json"] {
            ensure(names.contains(&want), || format!("{subject}: no {want}"))?;
        }
        ensure(names.iter().any(|n| n.starts_with("pbts")), || format!("{subject}: no PBT sources"))?;
        ensure(trees[0] == trees[1], || format!("{subject}: runs differ"))?;
        files += trees[0].len();
    }
    Ok(format!("4 bundles, {files} files byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("relevance reproduction", relevance),
        ("executability distribution", executability),
        ("effectiveness", effectiveness),
        ("simulator property suites", simulators),
        ("analyzer classification", classification),
        ("improvement loop", improvement_loop),
        ("guard round trip", guard_round_trip),
        ("replay determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
