//! Child-side test runner: interprets a test file with hypothesis, pytest and
//! gpiozero stand-ins plus the subject modules, then classifies the result.

use std::cell::{Cell, RefCell};
use std::io::Write;
use std::path::PathBuf;
use std::rc::{Rc, Weak};

use pbtlang::value::Function;
use pbtlang::{Builtin, Exc, Interpreter, ModuleObj, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::strategies::{self, ExampleSpec, GivenSpec, Settings, EXAMPLES_ATTR, GIVEN_ATTR, SETTINGS_ATTR};
use super::{gpiozero, pytest, subjects, OutcomeClass};
use crate::corpus::gpio::{FactoryRef, MockFactory};

pub const DEFAULT_MAX_EXAMPLES: u32 = 100;

/// Something that reacts to simulated time passing, e.g. a robot's control loop.
pub(crate) trait Poll {
    fn poll(&self, interp: &mut Interpreter) -> Result<(), Exc>;
}

/// State shared by all harness natives during one run.
pub(crate) struct Ctx {
    pub rng: RefCell<ChaCha8Rng>,
    pub factory: RefCell<FactoryRef>,
    pub live: RefCell<Vec<Weak<dyn Poll>>>,
    pub now: Cell<f64>,
    /// Offset into the interpreter's stdout already returned by `capsys`.
    pub captured: Cell<usize>,
}

impl Ctx {
    pub fn new(seed: u64) -> Rc<Self> {
        Rc::new(Ctx {
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
            factory: RefCell::new(MockFactory::new()),
            live: RefCell::default(),
            now: Cell::new(0.0),
            captured: Cell::new(0),
        })
    }

    /// Fresh pins for the next generated example.
    pub fn reset_devices(&self) {
        *self.factory.borrow_mut() = MockFactory::new();
        self.live.borrow_mut().clear();
    }

    pub fn factory(&self) -> FactoryRef {
        self.factory.borrow().clone()
    }

    pub fn next_seed(&self) -> u64 {
        self.rng.borrow_mut().gen()
    }

    pub fn sleep(&self, interp: &mut Interpreter, secs: f64) -> Result<(), Exc> {
        self.now.set(self.now.get() + secs.max(0.0));
        let live: Vec<Rc<dyn Poll>> = self.live.borrow().iter().filter_map(Weak::upgrade).collect();
        for p in live {
            p.poll(interp)?;
        }
        Ok(())
    }
}

const EXCEPTIONS: &[(&str, &str)] = &[
    ("UnsatisfiedAssumption", "Exception"),
    ("FailedHealthCheck", "Exception"),
    ("InvalidArgument", "Exception"),
    ("Unsatisfiable", "Exception"),
    ("Failed", "BaseException"),
    ("Skipped", "BaseException"),
    ("GPIOZeroError", "Exception"),
    ("BadPinFactory", "GPIOZeroError"),
    ("DeviceClosed", "GPIOZeroError"),
    ("GPIODeviceError", "GPIOZeroError"),
    ("GPIODeviceClosed", "GPIODeviceError"),
    ("GPIOPinInUse", "GPIODeviceError"),
    ("GPIOPinMissing", "GPIODeviceError"),
    ("PinError", "GPIOZeroError"),
    ("PinInvalidFunction", "PinError"),
    ("PinInvalidState", "PinError"),
    ("PinInvalidPull", "PinError"),
    ("PinInvalidPin", "PinError"),
    ("PinSetInput", "PinError"),
    ("PinFixedPull", "PinError"),
];

/// An interpreter with every harness module registered.
pub(crate) fn new_interpreter(ctx: &Rc<Ctx>) -> Interpreter {
    let mut interp = Interpreter::new();
    for (name, base) in EXCEPTIONS {
        interp.define_exception(name, Some(base));
    }
    let c = ctx.clone();
    interp.register_module("hypothesis", move |i| Ok(strategies::hypothesis_module(&c, i)));
    let c = ctx.clone();
    interp.register_module("hypothesis.strategies", move |_| Ok(strategies::strategies_module(&c)));
    interp.register_module("hypothesis.errors", |i| {
        let names = ["UnsatisfiedAssumption", "FailedHealthCheck", "InvalidArgument", "Unsatisfiable"];
        Ok(ModuleObj::value("hypothesis.errors", names.map(|n| (n.to_string(), Value::ExcClass(i.exc_class(n))))))
    });
    let c = ctx.clone();
    interp.register_module("pytest", move |i| Ok(pytest::pytest_module(&c, i)));
    let c = ctx.clone();
    interp.register_module("time", move |_| Ok(time_module(&c)));
    let c = ctx.clone();
    interp.register_module("random", move |_| Ok(random_module(&c)));
    gpiozero::register(&mut interp, ctx);
    subjects::register(&mut interp, ctx);
    interp
}

fn time_module(ctx: &Rc<Ctx>) -> Value {
    const EPOCH: f64 = 1_700_000_000.0;
    let c = ctx.clone();
    let sleep = Builtin::value("sleep", move |i, args, _| {
        let s = args.first().and_then(Value::as_f64).ok_or_else(|| i.error("TypeError", "sleep() needs a number"))?;
        if s < 0.0 {
            return Err(i.error("ValueError", "sleep length must be non-negative"));
        }
        c.sleep(i, s)?;
        Ok(Value::None)
    });
    let clock = |name: &'static str, base: f64, ctx: &Rc<Ctx>| {
        let c = ctx.clone();
        (name.to_string(), Builtin::value(name, move |_, _, _| Ok(Value::Float(base + c.now.get()))))
    };
    ModuleObj::value(
        "time",
        vec![
            ("sleep".to_string(), sleep),
            clock("time", EPOCH, ctx),
            clock("monotonic", 0.0, ctx),
            clock("perf_counter", 0.0, ctx),
        ],
    )
}

fn random_module(ctx: &Rc<Ctx>) -> Value {
    let f = |name: &'static str, ctx: &Rc<Ctx>, body: fn(&Ctx, &mut Interpreter, Vec<Value>) -> Result<Value, Exc>| {
        let c = ctx.clone();
        (name.to_string(), Builtin::value(name, move |i, args, _| body(&c, i, args)))
    };
    ModuleObj::value(
        "random",
        vec![
            f("random", ctx, |c, _, _| Ok(Value::Float(c.rng.borrow_mut().gen::<f64>()))),
            f("randint", ctx, |c, i, args| {
                let (Some(a), Some(b)) = (args.first().and_then(Value::as_int), args.get(1).and_then(Value::as_int)) else {
                    return Err(i.error("TypeError", "randint() needs two integers"));
                };
                if a > b {
                    return Err(i.error("ValueError", format!("empty range in randrange({a}, {})", b + 1)));
                }
                Ok(Value::Int(c.rng.borrow_mut().gen_range(a..=b)))
            }),
            f("uniform", ctx, |c, i, args| {
                let (Some(a), Some(b)) = (args.first().and_then(Value::as_f64), args.get(1).and_then(Value::as_f64)) else {
                    return Err(i.error("TypeError", "uniform() needs two numbers"));
                };
                Ok(Value::Float(a + (b - a) * c.rng.borrow_mut().gen::<f64>()))
            }),
            f("choice", ctx, |c, i, args| {
                let items = i.iterate(args.first().unwrap_or(&Value::None))?;
                if items.is_empty() {
                    return Err(i.error("IndexError", "Cannot choose from an empty sequence"));
                }
                let k = c.rng.borrow_mut().gen_range(0..items.len());
                Ok(items[k].clone())
            }),
            f("seed", ctx, |c, _, args| {
                let s = args.first().and_then(Value::as_int).unwrap_or(0);
                *c.rng.borrow_mut() = ChaCha8Rng::seed_from_u64(s as u64);
                Ok(Value::None)
            }),
            f("shuffle", ctx, |c, i, args| {
                let Some(Value::List(l)) = args.first() else {
                    return Err(i.error("TypeError", "shuffle() needs a list"));
                };
                let mut v = l.borrow_mut();
                for k in (1..v.len()).rev() {
                    let j = c.rng.borrow_mut().gen_range(0..=k);
                    v.swap(k, j);
                }
                Ok(Value::None)
            }),
        ],
    )
}

#[derive(Debug, Clone)]
pub struct HarnessOptions {
    pub subject: String,
    /// Shown in messages in place of the scratch path.
    pub file_name: String,
    pub seed: u64,
    pub max_examples: Option<u32>,
    /// JSON-lines sink for generated inputs.
    pub record: Option<PathBuf>,
    /// Keep generating after failures (effectiveness measurement).
    pub measure: bool,
}

impl HarnessOptions {
    pub fn new(subject: &str) -> Self {
        Self {
            subject: subject.to_string(),
            file_name: "test_generated.py".into(),
            seed: 0,
            max_examples: None,
            record: None,
            measure: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessResult {
    pub class: OutcomeClass,
    pub message: String,
    pub tests: Vec<String>,
    /// Generated examples executed across all tests.
    pub examples: u32,
    #[serde(default)]
    pub stdout: String,
}

impl HarnessResult {
    fn new(class: OutcomeClass, message: String) -> Self {
        Self { class, message, tests: Vec::new(), examples: 0, stdout: String::new() }
    }
}

fn failure_class(e: &Exc) -> OutcomeClass {
    if e.is_named("AssertionError") || e.is_named("Failed") {
        OutcomeClass::AssertionFailure
    } else {
        OutcomeClass::RuntimeException
    }
}

fn describe(e: &Exc, file: &str) -> String {
    match e.line() {
        Some(l) if l > 0 => format!("{e}\n  ({file}, line {l})"),
        _ => e.to_string(),
    }
}

fn value_json(v: &Value) -> serde_json::Value {
    use serde_json::Value as J;
    match v {
        Value::None => J::Null,
        Value::Bool(b) => J::Bool(*b),
        Value::Int(i) => J::from(*i),
        Value::Float(f) => serde_json::Number::from_f64(*f).map_or_else(|| J::String(f.to_string()), J::Number),
        Value::Str(s) => J::String(s.to_string()),
        Value::List(l) | Value::Set(l) => J::Array(l.borrow().iter().map(value_json).collect()),
        Value::Tuple(t) => J::Array(t.iter().map(value_json).collect()),
        other => J::String(other.repr()),
    }
}

struct Recorder {
    out: Option<std::fs::File>,
}

impl Recorder {
    fn line(&mut self, test: &str, inputs: &[(String, Value)]) {
        if let Some(f) = &mut self.out {
            let map: serde_json::Map<String, serde_json::Value> =
                inputs.iter().map(|(k, v)| (k.clone(), value_json(v))).collect();
            let rec = serde_json::json!({ "test": test, "inputs": map });
            let _ = writeln!(f, "{rec}");
        }
    }
}

/// A fixture visible to tests: a module-level function marked by
/// `@pytest.fixture` or a built-in one.
enum FixtureSource {
    Module(Value, String),
    Capsys,
}

struct TestRun<'a> {
    interp: &'a mut Interpreter,
    ctx: Rc<Ctx>,
    globals: pbtlang::value::Scope,
    opts: &'a HarnessOptions,
    recorder: Recorder,
    cache: Vec<(String, Value)>,
    examples: u32,
}

enum Verdict {
    Pass,
    Fail(OutcomeClass, String),
}

impl TestRun<'_> {
    fn fixture_source(&self, name: &str) -> Option<FixtureSource> {
        if name == "capsys" {
            return Some(FixtureSource::Capsys);
        }
        let v = self.globals.borrow().get(name).cloned()?;
        let Value::Function(f) = &v else { return None };
        let scope = f.attrs.borrow().get(pytest::FIXTURE_ATTR).map(Value::to_str)?;
        Some(FixtureSource::Module(v, scope))
    }

    fn is_function_scoped(&self, name: &str) -> bool {
        matches!(self.fixture_source(name), Some(FixtureSource::Capsys))
            || matches!(self.fixture_source(name), Some(FixtureSource::Module(_, s)) if s == "function")
    }

    fn resolve(&mut self, name: &str, depth: usize) -> Result<Value, Result<Exc, String>> {
        if let Some((_, v)) = self.cache.iter().find(|(k, _)| k == name) {
            return Ok(v.clone());
        }
        if depth > 20 {
            return Err(Err(format!("recursive dependency involving fixture '{name}'")));
        }
        match self.fixture_source(name) {
            None => Err(Err(format!("fixture '{name}' not found"))),
            Some(FixtureSource::Capsys) => {
                self.ctx.captured.set(self.interp.stdout.len());
                Ok(pytest::capsys(&self.ctx))
            }
            Some(FixtureSource::Module(f, scope)) => {
                let Value::Function(func) = &f else { unreachable!() };
                let mut kwargs = Vec::new();
                for p in required_params(func) {
                    kwargs.push((p.clone(), self.resolve(&p, depth + 1)?));
                }
                let v = self.interp.call(&f, Vec::new(), kwargs).map_err(Ok)?;
                if scope != "function" {
                    self.cache.push((name.to_string(), v.clone()));
                }
                Ok(v)
            }
        }
    }

    fn run_test(&mut self, name: &str, func: &Rc<Function>) -> Verdict {
        let fv = Value::Function(func.clone());
        let attr = |k: &str| func.attrs.borrow().get(k).cloned();
        let given = attr(GIVEN_ATTR);
        let settings = attr(SETTINGS_ATTR).and_then(|s| s.downcast::<Settings>().cloned()).unwrap_or_default();
        let cases = match pytest::parametrize_cases(self.interp, &fv) {
            Ok(c) => c,
            Err(e) => return Verdict::Fail(OutcomeClass::CollectionError, describe(&e, &self.opts.file_name)),
        };
        let params: Vec<String> = func.params.names().map(str::to_string).collect();

        let mut verdict = Verdict::Pass;
        for case in cases {
            let v = match &given {
                Some(g) => {
                    let spec = g.downcast::<GivenSpec>().expect("given attribute holds a GivenSpec");
                    self.run_given(name, &fv, func, &params, &case, spec, &settings, attr(EXAMPLES_ATTR))
                }
                None => self.run_plain(name, &fv, func, &case),
            };
            if let Verdict::Fail(..) = v {
                verdict = v;
                if !self.opts.measure {
                    break;
                }
            }
        }
        verdict
    }

    fn fixture_kwargs(&mut self, names: &[String]) -> Result<Vec<(String, Value)>, Verdict> {
        let mut out = Vec::new();
        for n in names {
            match self.resolve(n, 0) {
                Ok(v) => out.push((n.clone(), v)),
                Err(Ok(e)) => {
                    return Err(Verdict::Fail(
                        OutcomeClass::RuntimeException,
                        format!("error in fixture '{n}': {}", describe(&e, &self.opts.file_name)),
                    ))
                }
                Err(Err(msg)) => return Err(Verdict::Fail(OutcomeClass::CollectionError, msg)),
            }
        }
        Ok(out)
    }

    fn run_plain(&mut self, name: &str, fv: &Value, func: &Function, case: &[(String, Value)]) -> Verdict {
        self.ctx.reset_devices();
        let fixtures: Vec<String> =
            required_params(func).into_iter().filter(|p| !case.iter().any(|(k, _)| k == p)).collect();
        let mut kwargs = match self.fixture_kwargs(&fixtures) {
            Ok(k) => k,
            Err(v) => return v,
        };
        kwargs.extend(case.iter().cloned());
        self.examples += 1;
        match self.interp.call(fv, Vec::new(), kwargs) {
            Ok(_) => Verdict::Pass,
            Err(e) if e.is_named("Skipped") => Verdict::Pass,
            Err(e) => Verdict::Fail(failure_class(&e), format!("{name} failed: {}", describe(&e, &self.opts.file_name))),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_given(
        &mut self,
        name: &str,
        fv: &Value,
        func: &Function,
        params: &[String],
        case: &[(String, Value)],
        spec: &GivenSpec,
        settings: &Settings,
        explicit: Option<Value>,
    ) -> Verdict {
        let fail = |msg: String| Verdict::Fail(OutcomeClass::RuntimeException, msg);
        // Bind strategies: keywords by name, positionals to the rightmost parameters.
        let mut bound: Vec<(String, Rc<strategies::Strategy>)> = Vec::new();
        for (k, s) in &spec.kwargs {
            if !params.contains(k) {
                return fail(format!("InvalidArgument: {name}() got an unexpected keyword argument {k:?}, from `{k}={}` in @given", s.repr));
            }
            bound.push((k.clone(), s.clone()));
        }
        let free: Vec<&String> = func
            .params
            .positional
            .iter()
            .map(|p| &p.name)
            .filter(|p| !spec.kwargs.iter().any(|(k, _)| k == *p) && !case.iter().any(|(k, _)| k == *p))
            .collect();
        if spec.args.len() > free.len() {
            return fail(format!("InvalidArgument: Too many positional arguments for {name}() were passed to @given"));
        }
        let positional_targets = &free[free.len() - spec.args.len()..];
        for (p, s) in positional_targets.iter().zip(&spec.args) {
            bound.push(((*p).clone(), s.clone()));
        }
        let fixtures: Vec<String> = required_params(func)
            .into_iter()
            .filter(|p| !bound.iter().any(|(k, _)| k == p) && !case.iter().any(|(k, _)| k == p))
            .collect();

        if !settings.suppressed.iter().any(|s| s == "function_scoped_fixture") {
            if let Some(f) = fixtures.iter().find(|f| self.is_function_scoped(f)) {
                return fail(format!(
                    "FailedHealthCheck: {name}() uses a function-scoped fixture '{f}'.\n\
                     Function-scoped fixtures are set up once per test, not once per generated example, \
                     so their state leaks between examples. Use a context manager inside the test instead, \
                     or suppress HealthCheck.function_scoped_fixture if the leak is harmless."
                ));
            }
        }

        if let Some(Value::List(l)) = explicit {
            let examples: Vec<Value> = l.borrow().clone();
            for ex in examples {
                let ex = ex.downcast::<ExampleSpec>().expect("example attribute holds ExampleSpec");
                self.ctx.reset_devices();
                let mut kwargs = match self.fixture_kwargs(&fixtures) {
                    Ok(k) => k,
                    Err(v) => return v,
                };
                kwargs.extend(case.iter().cloned());
                kwargs.extend(ex.kwargs.iter().cloned());
                for (p, a) in positional_targets.iter().zip(&ex.args) {
                    kwargs.push(((*p).clone(), a.clone()));
                }
                if let Err(e) = self.interp.call(fv, Vec::new(), kwargs.clone()) {
                    if !e.is_named("UnsatisfiedAssumption") {
                        return falsified(name, &e, &kwargs, &self.opts.file_name);
                    }
                }
            }
        }

        let n = self.opts.max_examples.or(settings.max_examples).unwrap_or(DEFAULT_MAX_EXAMPLES);
        let (mut valid, mut draws) = (0u32, 0u32);
        let mut first_failure: Option<Verdict> = None;
        while valid < n && draws < n.saturating_mul(10) {
            draws += 1;
            self.ctx.reset_devices();
            let mut drawn = Vec::with_capacity(bound.len());
            let mut rejected = false;
            for (k, s) in &bound {
                match s.draw(self.interp) {
                    Ok(v) => drawn.push((k.clone(), v)),
                    Err(e) if e.is_named("UnsatisfiedAssumption") => {
                        rejected = true;
                        break;
                    }
                    Err(e) => return fail(format!("{name}: error while generating '{k}': {e}")),
                }
            }
            if rejected {
                continue;
            }
            self.recorder.line(name, &drawn);
            let mut kwargs = match self.fixture_kwargs(&fixtures) {
                Ok(k) => k,
                Err(v) => return v,
            };
            kwargs.extend(case.iter().cloned());
            kwargs.extend(drawn.iter().cloned());
            self.examples += 1;
            match self.interp.call(fv, Vec::new(), kwargs) {
                Ok(_) => valid += 1,
                Err(e) if e.is_named("UnsatisfiedAssumption") => {}
                Err(e) => {
                    valid += 1;
                    if first_failure.is_none() {
                        first_failure = Some(falsified(name, &e, &drawn, &self.opts.file_name));
                    }
                    if !self.opts.measure {
                        break;
                    }
                }
            }
        }
        if let Some(f) = first_failure {
            return f;
        }
        if valid == 0 && draws > 0 {
            return fail(format!("Unsatisfiable: Unable to satisfy assumptions of {name}() in {draws} attempts"));
        }
        Verdict::Pass
    }
}

fn falsified(name: &str, e: &Exc, inputs: &[(String, Value)], file: &str) -> Verdict {
    let args = inputs.iter().map(|(k, v)| format!("    {k}={},\n", v.repr())).collect::<String>();
    Verdict::Fail(
        failure_class(e),
        format!("{name} failed: {}\nFalsifying example: {name}(\n{args})", describe(e, file)),
    )
}

fn required_params(func: &Function) -> Vec<String> {
    let p = &func.params;
    let mut out: Vec<String> =
        p.positional.iter().enumerate().filter(|(i, _)| func.defaults[*i].is_none()).map(|(_, q)| q.name.clone()).collect();
    out.extend(p.kwonly.iter().enumerate().filter(|(i, _)| func.kwdefaults[*i].is_none()).map(|(_, q)| q.name.clone()));
    out
}

/// Parses and executes `source`, then runs every collected test.
pub fn run_harness(source: &str, opts: &HarnessOptions) -> HarnessResult {
    let ctx = Ctx::new(opts.seed);
    let mut interp = new_interpreter(&ctx);
    let file = opts.file_name.as_str();

    let module = match pbtlang::parse_module(source) {
        Ok(m) => m,
        Err(e) if e.unsupported => {
            return HarnessResult::new(OutcomeClass::CollectionError, format!("ERROR collecting {file}: {e}"))
        }
        Err(e) => return HarnessResult::new(OutcomeClass::SyntaxError, format!("{file}: {e}")),
    };
    let globals = match interp.run_module(&module) {
        Ok(g) => g,
        Err(e) => {
            let mut r = HarnessResult::new(OutcomeClass::CollectionError, format!("ERROR collecting {file}: {}", describe(&e, file)));
            r.stdout = std::mem::take(&mut interp.stdout);
            return r;
        }
    };
    let tests: Vec<(String, Rc<Function>)> = globals
        .borrow()
        .iter()
        .filter(|(k, _)| k.starts_with("test"))
        .filter_map(|(k, v)| match v {
            Value::Function(f) if !f.attrs.borrow().contains_key(pytest::FIXTURE_ATTR) => Some((k.clone(), f.clone())),
            _ => None,
        })
        .collect();
    if tests.is_empty() {
        let mut r = HarnessResult::new(OutcomeClass::NoTestProduced, format!("{file}: no tests collected"));
        r.stdout = std::mem::take(&mut interp.stdout);
        return r;
    }

    let recorder = Recorder {
        out: opts.record.as_ref().and_then(|p| std::fs::File::create(p).ok()),
    };
    let mut run = TestRun { interp: &mut interp, ctx: ctx.clone(), globals, opts, recorder, cache: Vec::new(), examples: 0 };
    let mut failures: Vec<(OutcomeClass, String)> = Vec::new();
    for (name, func) in &tests {
        if let Verdict::Fail(c, m) = run.run_test(name, func) {
            failures.push((c, m));
        }
    }
    let examples = run.examples;
    let (class, message) = match failures.first() {
        None => (OutcomeClass::Pass, String::new()),
        Some((c, _)) => (*c, failures.iter().map(|(_, m)| m.as_str()).collect::<Vec<_>>().join("\n\n")),
    };
    HarnessResult {
        class,
        message,
        tests: tests.into_iter().map(|(n, _)| n).collect(),
        examples,
        stdout: std::mem::take(&mut interp.stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> HarnessResult {
        run_harness(src, &HarnessOptions::new("pcs"))
    }

    #[test]
    fn classifies_basic_shapes() {
        assert_eq!(run("def test_x(:\n    pass\n").class, OutcomeClass::SyntaxError);
        assert_eq!(run("import nosuchmodule\ndef test_x():\n    pass\n").class, OutcomeClass::CollectionError);
        assert_eq!(run("def helper():\n    pass\n").class, OutcomeClass::NoTestProduced);
        let r = run("def test_x():\n    assert 1 == 2, 'nope'\n");
        assert_eq!(r.class, OutcomeClass::AssertionFailure);
        assert!(r.message.contains("nope"), "{}", r.message);
        assert_eq!(run("def test_x():\n    {}['k']\n").class, OutcomeClass::RuntimeException);
        assert_eq!(run("def test_x():\n    pass\n").class, OutcomeClass::Pass);
    }

    #[test]
    fn given_draws_and_reports_falsifying_example() {
        let src = "from hypothesis import given, strategies as st\n\n@given(st.integers(min_value=0, max_value=9))\ndef test_small(x):\n    assert x < 9\n";
        let r = run(src);
        assert_eq!(r.class, OutcomeClass::AssertionFailure);
        assert!(r.message.contains("Falsifying example: test_small(\n    x=9,\n)"), "{}", r.message);

        let ok = "from hypothesis import given, settings, strategies as st\n\n@settings(max_examples=7)\n@given(x=st.floats(min_value=0.0, max_value=1.0), b=st.booleans())\ndef test_ok(x, b):\n    assert 0.0 <= x <= 1.0\n";
        let r = run(ok);
        assert_eq!(r.class, OutcomeClass::Pass, "{}", r.message);
        assert_eq!(r.examples, 7);
    }

    #[test]
    fn function_fixture_with_given_fails_health_check() {
        let src = "import pytest\nfrom hypothesis import given, strategies as st\n\n@pytest.fixture\ndef thing():\n    return 3\n\n@given(st.integers())\ndef test_t(thing, x):\n    assert thing == 3\n\ndef test_plain(thing):\n    assert thing == 3\n";
        let r = run(src);
        assert_eq!(r.class, OutcomeClass::RuntimeException);
        assert!(r.message.contains("FailedHealthCheck"));
        assert_eq!(r.tests, ["test_t", "test_plain"]);
    }

    #[test]
    fn assume_filters_examples() {
        let src = "from hypothesis import given, assume, strategies as st\n\n@given(st.integers(0, 10))\ndef test_even(x):\n    assume(x % 2 == 0)\n    assert x % 2 == 0\n";
        assert_eq!(run(src).class, OutcomeClass::Pass);
        let never = "from hypothesis import given, assume, strategies as st\n\n@given(st.integers(0, 10))\ndef test_never(x):\n    assume(False)\n";
        assert!(run(never).message.contains("Unsatisfiable"));
    }

    #[test]
    fn seeds_make_runs_reproducible() {
        let src = "from hypothesis import given, strategies as st\n\n@given(st.floats(min_value=0, max_value=100))\ndef test_f(x):\n    print(x)\n";
        assert_eq!(run(src).stdout, run(src).stdout);
        let mut other = HarnessOptions::new("pcs");
        other.seed = 1;
        assert_ne!(run(src).stdout, run_harness(src, &other).stdout);
    }
}
