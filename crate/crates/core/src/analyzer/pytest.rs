//! The slice of `pytest` generated tests use: fixtures, `raises`,
//! `mark.parametrize`, `fail`, `skip` and `capsys`.

use std::any::Any;
use std::cell::RefCell;
use std::rc::Rc;

use pbtlang::builtins::bind;
use pbtlang::{Builtin, Exc, Interpreter, Kwargs, ModuleObj, NativeObject, Value};

use super::harness::Ctx;

pub(crate) const FIXTURE_ATTR: &str = "__pytest_fixture__";
pub(crate) const PARAMETRIZE_ATTR: &str = "__pytest_parametrize__";

struct FixtureDecorator {
    scope: String,
}

impl NativeObject for FixtureDecorator {
    fn type_name(&self) -> String {
        "FixtureFunctionMarker".into()
    }

    fn call(&self, interp: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Value, Exc> {
        let [f] = <[Value; 1]>::try_from(args).map_err(|_| interp.error("TypeError", "fixture() decorates one function"))?;
        interp.set_attr(&f, FIXTURE_ATTR, Value::str(&self.scope))?;
        Ok(f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Context manager returned by `pytest.raises`.
struct Raises {
    expected: Value,
    pattern: Option<String>,
    caught: Rc<RefCell<Option<Exc>>>,
}

impl NativeObject for Raises {
    fn type_name(&self) -> String {
        "RaisesContext".into()
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(Value::native(ExcInfo(self.caught.clone())))
    }

    fn exit(&self, interp: &mut Interpreter, exc: Option<&Exc>) -> Result<bool, Exc> {
        let Some(e) = exc else {
            let name = match &self.expected {
                Value::ExcClass(c) => c.name.clone(),
                other => other.repr(),
            };
            return Err(interp.error("Failed", format!("DID NOT RAISE <class '{name}'>")));
        };
        if !interp.exception_matches(e, &self.expected)? {
            return Ok(false);
        }
        if let Some(p) = &self.pattern {
            if !e.message().contains(p.as_str()) {
                return Err(interp.error(
                    "AssertionError",
                    format!("Regex pattern did not match.\n Regex: {p:?}\n Input: {:?}", e.message()),
                ));
            }
        }
        *self.caught.borrow_mut() = Some(e.clone());
        Ok(true)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct ExcInfo(Rc<RefCell<Option<Exc>>>);

impl NativeObject for ExcInfo {
    fn type_name(&self) -> String {
        "ExceptionInfo".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        (name == "value").then(|| Ok(self.0.borrow().clone().map_or(Value::None, Value::Exception)))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct Parametrize {
    names: Vec<String>,
    rows: Vec<Value>,
}

impl NativeObject for Parametrize {
    fn type_name(&self) -> String {
        "MarkDecorator".into()
    }

    fn call(&self, interp: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Value, Exc> {
        let [f] = <[Value; 1]>::try_from(args).map_err(|_| interp.error("TypeError", "parametrize decorates one test"))?;
        let mut marks = match interp.get_attr(&f, PARAMETRIZE_ATTR) {
            Ok(Value::List(l)) => l.borrow().clone(),
            _ => Vec::new(),
        };
        let names = Value::list(self.names.iter().map(Value::str).collect());
        marks.insert(0, Value::tuple(vec![names, Value::list(self.rows.clone())]));
        interp.set_attr(&f, PARAMETRIZE_ATTR, Value::list(marks))?;
        Ok(f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Expands stacked `parametrize` marks into keyword sets; a test without
/// marks has one empty case.
pub(crate) fn parametrize_cases(interp: &mut Interpreter, f: &Value) -> Result<Vec<Vec<(String, Value)>>, Exc> {
    let marks = match interp.get_attr(f, PARAMETRIZE_ATTR) {
        Ok(Value::List(l)) => l.borrow().clone(),
        _ => return Ok(vec![Vec::new()]),
    };
    let mut cases: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for m in marks {
        let Value::Tuple(t) = &m else { continue };
        let names: Vec<String> = interp.iterate(&t[0])?.iter().map(Value::to_str).collect();
        let rows = interp.iterate(&t[1])?;
        let mut next = Vec::new();
        for case in &cases {
            for row in &rows {
                let values = if names.len() == 1 { vec![row.clone()] } else { interp.iterate(row)? };
                if values.len() != names.len() {
                    return Err(interp.error(
                        "ValueError",
                        format!("wrong number of values in parametrize row: expected {}, got {}", names.len(), values.len()),
                    ));
                }
                let mut c = case.clone();
                c.extend(names.iter().cloned().zip(values));
                next.push(c);
            }
        }
        cases = next;
    }
    Ok(cases)
}

struct Capsys(Rc<Ctx>);

struct Captured {
    out: String,
}

impl NativeObject for Captured {
    fn type_name(&self) -> String {
        "CaptureResult".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        match name {
            "out" => Some(Ok(Value::str(&self.out))),
            "err" => Some(Ok(Value::str(""))),
            _ => None,
        }
    }

    fn iterate(&self, _interp: &mut Interpreter) -> Option<Result<Vec<Value>, Exc>> {
        Some(Ok(vec![Value::str(&self.out), Value::str("")]))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

impl NativeObject for Capsys {
    fn type_name(&self) -> String {
        "CaptureFixture".into()
    }

    fn has_method(&self, name: &str) -> bool {
        name == "readouterr"
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        (name == "readouterr").then(|| {
            let from = self.0.captured.get().min(interp.stdout.len());
            let out = interp.stdout[from..].to_string();
            self.0.captured.set(interp.stdout.len());
            Ok(Value::native(Captured { out }))
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) fn capsys(ctx: &Rc<Ctx>) -> Value {
    Value::native(Capsys(ctx.clone()))
}

pub(crate) fn pytest_module(_ctx: &Rc<Ctx>, _interp: &mut Interpreter) -> Value {
    let fixture = Builtin::value("fixture", |i, args, kw| {
        let s = bind(i, "fixture", &["fixture_function", "scope", "params", "autouse", "ids", "name"], args, kw)?;
        let scope = s[1].as_ref().map(Value::to_str).unwrap_or_else(|| "function".into());
        let deco = FixtureDecorator { scope };
        match &s[0] {
            Some(f @ Value::Function(_)) => deco.call(i, vec![f.clone()], Vec::new()),
            _ => Ok(Value::native(deco)),
        }
    });
    let raises = Builtin::value("raises", |i, args, kw| {
        let s = bind(i, "raises", &["expected_exception", "match"], args, kw)?;
        let expected = s[0].clone().ok_or_else(|| i.error("TypeError", "raises() missing expected_exception"))?;
        Ok(Value::native(Raises { expected, pattern: s[1].as_ref().map(Value::to_str), caught: Rc::default() }))
    });
    let parametrize = Builtin::value("parametrize", |i, args, kw| {
        let s = bind(i, "parametrize", &["argnames", "argvalues", "ids"], args, kw)?;
        let names = match &s[0] {
            Some(Value::Str(n)) => n.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
            Some(other) => i.iterate(other)?.iter().map(Value::to_str).collect(),
            None => return Err(i.error("TypeError", "parametrize() missing argnames")),
        };
        let rows = i.iterate(s[1].as_ref().unwrap_or(&Value::None))?;
        Ok(Value::native(Parametrize { names, rows }))
    });
    let mark = ModuleObj::value("mark", vec![("parametrize".to_string(), parametrize)]);
    let fail = Builtin::value("fail", |i, args, _| {
        Err(i.error("Failed", args.first().map(Value::to_str).unwrap_or_default()))
    });
    let skip = Builtin::value("skip", |i, args, _| {
        Err(i.error("Skipped", args.first().map(Value::to_str).unwrap_or_default()))
    });
    ModuleObj::value(
        "pytest",
        vec![
            ("fixture".to_string(), fixture),
            ("raises".to_string(), raises),
            ("mark".to_string(), mark),
            ("fail".to_string(), fail),
            ("skip".to_string(), skip),
        ],
    )
}

#[cfg(test)]
mod tests {
    use crate::analyzer::harness::{run_harness, HarnessOptions};
    use crate::analyzer::OutcomeClass;

    fn class(src: &str) -> (OutcomeClass, String) {
        let r = run_harness(src, &HarnessOptions::new("tcs"));
        (r.class, r.message)
    }

    #[test]
    fn raises_and_parametrize() {
        let src = r#"
import pytest

@pytest.mark.parametrize("a,b", [(1, 2), (2, 4)])
def test_double(a, b):
    assert a * 2 == b

def test_raises():
    with pytest.raises(ZeroDivisionError):
        1 / 0
    with pytest.raises(ValueError, match="bad"):
        raise ValueError("a bad value")
"#;
        assert_eq!(class(src).0, OutcomeClass::Pass);
        let (c, m) = class("import pytest\ndef test_r():\n    with pytest.raises(ValueError):\n        pass\n");
        assert_eq!(c, OutcomeClass::AssertionFailure);
        assert!(m.contains("DID NOT RAISE"));
    }

    #[test]
    fn fixtures_chain_and_capsys() {
        let src = r#"
import pytest

@pytest.fixture(scope="module")
def base():
    return 2

@pytest.fixture
def doubled(base):
    return base * 2

def test_chain(doubled, capsys):
    print("hello")
    assert capsys.readouterr().out == "hello\n"
    assert doubled == 4
"#;
        assert_eq!(class(src), (OutcomeClass::Pass, String::new()));
        let (c, m) = class("def test_missing(nothing):\n    pass\n");
        assert_eq!(c, OutcomeClass::CollectionError);
        assert!(m.contains("fixture 'nothing' not found"));
    }
}
