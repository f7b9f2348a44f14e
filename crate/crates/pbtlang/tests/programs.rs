use pbtlang::{run_source, Interpreter, RunError, Value};

fn run(src: &str) -> (Interpreter, Result<pbtlang::value::Scope, RunError>) {
    let mut interp = Interpreter::new();
    let r = run_source(&mut interp, src);
    (interp, r)
}

fn global(src: &str, name: &str) -> Value {
    let (_, r) = run(src);
    let scope = r.unwrap_or_else(|e| panic!("program failed: {e:?}"));
    let v = scope.borrow().get(name).cloned().unwrap_or_else(|| panic!("{name} not bound"));
    v
}

fn raised(src: &str) -> String {
    match run(src).1 {
        Err(RunError::Exception(e)) => e.to_string(),
        other => panic!("expected exception, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn arithmetic_follows_python_rules() {
    assert_eq!(global("x = -7 // 2", "x").repr(), "-4");
    assert_eq!(global("x = -7 % 2", "x").repr(), "1");
    assert_eq!(global("x = 7 / 2", "x").repr(), "3.5");
    assert_eq!(global("x = 2 ** 10", "x").repr(), "1024");
    assert_eq!(global("x = 2 ** -1", "x").repr(), "0.5");
    assert_eq!(global("x = 0.1 + 0.2", "x").repr(), "0.30000000000000004");
    assert_eq!(global("x = True + 1", "x").repr(), "2");
    assert_eq!(raised("x = 1 / 0"), "ZeroDivisionError: division by zero");
}

#[test]
fn functions_defaults_and_closures() {
    let src = r#"
def make(k):
    def add(x, y=1, *rest, scale=1, **extra):
        return (x + y + k + sum(rest)) * scale
    return add
f = make(10)
a = f(1)
b = f(1, 2, 3, 4, scale=2)
c = (lambda v: v * k2)(3) if (k2 := 0) else None
"#;
    // walrus is rejected as unsupported
    assert!(matches!(run(src).1, Err(RunError::Syntax(e)) if e.unsupported));
    let src = src.replace("c = (lambda v: v * k2)(3) if (k2 := 0) else None\n", "c = (lambda v: v * 2)(3)\n");
    assert_eq!(global(&src, "a").repr(), "12");
    assert_eq!(global(&src, "b").repr(), "40");
    assert_eq!(global(&src, "c").repr(), "6");
}

#[test]
fn argument_errors_name_the_function() {
    assert_eq!(
        raised("def f(a, b):\n    pass\nf(1)\n"),
        "TypeError: f() missing 1 required positional argument: 'b'"
    );
    assert_eq!(
        raised("def f(a):\n    pass\nf(1, z=2)\n"),
        "TypeError: f() got an unexpected keyword argument 'z'"
    );
}

#[test]
fn assertion_messages_show_operands() {
    assert_eq!(raised("x = 25\nassert 20 <= x <= 24\n"), "AssertionError: assert 20 <= 25 <= 24");
    assert_eq!(raised("assert [] , 'empty'\n"), "AssertionError: empty\nassert []");
    assert_eq!(raised("assert not 3\n"), "AssertionError: assert not 3");
}

#[test]
fn exceptions_are_caught_by_class_hierarchy() {
    let src = r#"
log = []
try:
    {}["k"]
except LookupError as e:
    log.append(str(e))
try:
    try:
        raise ValueError("bad")
    finally:
        log.append("finally")
except (TypeError, ValueError) as e:
    log.append(e.args[0])
try:
    undefined_name
except Exception as e:
    log.append(type(e).__name__)
"#;
    assert_eq!(global(src, "log").repr(), "[\"'k'\", 'finally', 'bad', 'NameError']");
}

#[test]
fn collections_and_comprehensions() {
    let src = r#"
xs = [i * i for i in range(6) if i % 2 == 0]
d = {"a": 1, "b": 2}
d["c"] = 3
keys = sorted(d.keys(), reverse=True)
pairs = [(k, v) for k, v in d.items()]
first, *_ = [1, 2]
"#;
    let _ = first_rest_unsupported(src);
    let src = src.replace("first, *_ = [1, 2]\n", "first, second = [1, 2]\n");
    assert_eq!(global(&src, "xs").repr(), "[0, 4, 16]");
    assert_eq!(global(&src, "keys").repr(), "['c', 'b', 'a']");
    assert_eq!(global(&src, "pairs").repr(), "[('a', 1), ('b', 2), ('c', 3)]");
    assert_eq!(global(&src, "second").repr(), "2");
}

fn first_rest_unsupported(src: &str) -> bool {
    matches!(run(src).1, Err(RunError::Syntax(_)))
}

#[test]
fn string_formatting() {
    let src = r#"
t = 21.456
a = f"{t:.2f}|{t:>8.1f}|{7:03d}|{'x'!r}|{t}"
b = "{} and {name}".format(1, name="two")
c = "%s=%.1f" % ("t", t)
e = f"{1e-7}|{12345.678:,.1f}|{0.5:.0%}"
"#;
    assert_eq!(global(src, "a").to_str(), "21.46|    21.5|007|'x'|21.456");
    assert_eq!(global(src, "b").to_str(), "1 and two");
    assert_eq!(global(src, "c").to_str(), "t=21.5");
    assert_eq!(global(src, "e").to_str(), "1e-07|12,345.7|50%");
}

#[test]
fn print_is_captured() {
    let (interp, r) = run("print('a', 1, sep='-')\nprint('b', end='')\n");
    r.unwrap();
    assert_eq!(interp.stdout, "a-1\nb");
}

#[test]
fn unknown_module_is_module_not_found() {
    assert_eq!(raised("import numpy\n"), "ModuleNotFoundError: No module named 'numpy'");
    assert_eq!(raised("from math import nope\n"), "ImportError: cannot import name 'nope' from 'math'");
    assert_eq!(global("import math\nx = math.floor(2.7)\n", "x").repr(), "2");
}

#[test]
fn runaway_recursion_is_recursion_error() {
    let msg = std::thread::Builder::new()
        .stack_size(64 * 1024 * 1024)
        .spawn(|| raised("def f(n):\n    return f(n + 1)\nf(0)\n"))
        .unwrap()
        .join()
        .unwrap();
    assert_eq!(msg, "RecursionError: maximum recursion depth exceeded");
}

#[test]
fn syntax_errors_carry_positions() {
    let Err(RunError::Syntax(e)) = run("def f(:\n    pass\n").1 else { panic!() };
    assert_eq!(e.line, 1);
    let Err(RunError::Syntax(e)) = run("x = 1\n  y = 2\n").1 else { panic!() };
    assert_eq!(e.msg, "unexpected indent");
}

#[test]
fn native_objects_expose_attributes_and_methods() {
    use pbtlang::{Kwargs, NativeObject};
    use std::cell::Cell;

    struct Counter(Cell<i64>);
    impl NativeObject for Counter {
        fn type_name(&self) -> String {
            "Counter".into()
        }
        fn get_attr(&self, _: &mut Interpreter, name: &str) -> Option<Result<Value, pbtlang::Exc>> {
            (name == "value").then(|| Ok(Value::Int(self.0.get())))
        }
        fn has_method(&self, name: &str) -> bool {
            name == "bump"
        }
        fn call_method(&self, _: &mut Interpreter, name: &str, args: Vec<Value>, _: Kwargs) -> Option<Result<Value, pbtlang::Exc>> {
            (name == "bump").then(|| {
                self.0.set(self.0.get() + args.first().and_then(Value::as_int).unwrap_or(1));
                Ok(Value::None)
            })
        }
        fn as_any(&self) -> &dyn std::any::Any {
            self
        }
    }
    let mut interp = Interpreter::new();
    interp.register_module("counters", |_| {
        Ok(pbtlang::ModuleObj::value("counters", [("c".to_string(), Value::native(Counter(Cell::new(0))))]))
    });
    let scope = run_source(&mut interp, "from counters import c\nc.bump()\nb = c.bump\nb(5)\nv = c.value\n").unwrap();
    assert_eq!(scope.borrow()["v"].repr(), "6");
    let err = run_source(&mut interp, "from counters import c\nc.nope\n").unwrap_err();
    assert!(matches!(err, RunError::Exception(e) if e.to_string() == "AttributeError: 'Counter' object has no attribute 'nope'"));
}
