//! Built-in functions, methods of built-in types, and string formatting.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::rc::Rc;

use crate::interp::Interpreter;
use crate::value::*;

/// Binds call arguments to named parameters.
///
/// Returns one slot per name; unknown keywords and surplus positionals are
/// `TypeError`s.
pub fn bind(
    interp: &Interpreter,
    fname: &str,
    names: &[&str],
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Vec<Option<Value>>, Exc> {
    if args.len() > names.len() {
        return Err(interp.error(
            "TypeError",
            format!("{fname}() takes at most {} arguments ({} given)", names.len(), args.len()),
        ));
    }
    let mut slots: Vec<Option<Value>> = args.into_iter().map(Some).collect();
    slots.resize(names.len(), None);
    for (k, v) in kwargs {
        match names.iter().position(|n| *n == k) {
            Some(i) if slots[i].is_none() => slots[i] = Some(v),
            Some(_) => {
                return Err(interp.error("TypeError", format!("{fname}() got multiple values for argument '{k}'")))
            }
            None => {
                return Err(interp.error("TypeError", format!("{fname}() got an unexpected keyword argument '{k}'")))
            }
        }
    }
    Ok(slots)
}

/// Like [`bind`] but every parameter is required.
pub fn bind_required(
    interp: &Interpreter,
    fname: &str,
    names: &[&str],
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Vec<Value>, Exc> {
    let slots = bind(interp, fname, names, args, kwargs)?;
    slots
        .into_iter()
        .zip(names)
        .map(|(s, n)| {
            s.ok_or_else(|| interp.error("TypeError", format!("{fname}() missing required argument: '{n}'")))
        })
        .collect()
}

pub fn expect_float(interp: &Interpreter, v: &Value, what: &str) -> Result<f64, Exc> {
    v.as_f64()
        .ok_or_else(|| interp.error("TypeError", format!("{what} must be a real number, not {}", v.type_name())))
}

pub fn expect_int(interp: &Interpreter, v: &Value, what: &str) -> Result<i64, Exc> {
    v.as_int()
        .ok_or_else(|| interp.error("TypeError", format!("{what} must be an integer, not {}", v.type_name())))
}

const TYPE_NAMES: &[&str] = &["int", "float", "str", "bool", "list", "tuple", "dict", "set", "range", "type", "object"];

fn is_instance(interp: &mut Interpreter, v: &Value, cls: &Value) -> Result<bool, Exc> {
    match cls {
        Value::Tuple(items) => {
            for c in items.iter() {
                if is_instance(interp, v, c)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Value::Builtin(b) if TYPE_NAMES.contains(&b.name.as_str()) => Ok(match b.name.as_str() {
            "int" => matches!(v, Value::Int(_) | Value::Bool(_)),
            "object" => true,
            name => v.type_name() == name,
        }),
        Value::ExcClass(c) => Ok(match v {
            Value::Exception(e) => e.is_instance(c),
            _ => false,
        }),
        Value::Native(n) => {
            let n = n.clone();
            match n.call_method(interp, "__instancecheck__", vec![v.clone()], Vec::new()) {
                Some(r) => Ok(r?.truthy()),
                None => Err(interp.error("TypeError", "isinstance() arg 2 must be a type or tuple of types")),
            }
        }
        _ => Err(interp.error("TypeError", "isinstance() arg 2 must be a type or tuple of types")),
    }
}

fn sort_values(interp: &mut Interpreter, items: &mut [Value], key: Option<&Value>, reverse: bool) -> Result<(), Exc> {
    let keys: Vec<Value> = match key {
        Some(k) if !k.is_none() => {
            let mut out = Vec::with_capacity(items.len());
            for v in items.iter() {
                out.push(interp.call(k, vec![v.clone()], Vec::new())?);
            }
            out
        }
        _ => items.to_vec(),
    };
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut failure = None;
    idx.sort_by(|&a, &b| match keys[a].py_cmp(&keys[b]) {
        Some(o) => {
            if reverse {
                o.reverse()
            } else {
                o
            }
        }
        None => {
            if !(keys[a].is_number() && keys[b].is_number()) && failure.is_none() {
                failure = Some((keys[a].type_name(), keys[b].type_name()));
            }
            Ordering::Equal
        }
    });
    if let Some((a, b)) = failure {
        return Err(interp.error("TypeError", format!("'<' not supported between instances of '{a}' and '{b}'")));
    }
    let sorted: Vec<Value> = idx.into_iter().map(|i| items[i].clone()).collect();
    items.clone_from_slice(&sorted);
    Ok(())
}

fn min_max(interp: &mut Interpreter, name: &str, args: Vec<Value>, kwargs: Kwargs, want: Ordering) -> Result<Value, Exc> {
    let mut key = None;
    let mut default = None;
    for (k, v) in kwargs {
        match k.as_str() {
            "key" => key = Some(v),
            "default" => default = Some(v),
            _ => return Err(interp.error("TypeError", format!("{name}() got an unexpected keyword argument '{k}'"))),
        }
    }
    let items = match args.len() {
        0 => return Err(interp.error("TypeError", format!("{name} expected at least 1 argument, got 0"))),
        1 => interp.iterate(&args[0])?,
        _ => args,
    };
    if items.is_empty() {
        return default.ok_or_else(|| interp.error("ValueError", format!("{name}() arg is an empty sequence")));
    }
    let mut best = items[0].clone();
    let mut best_key = match &key {
        Some(k) => interp.call(k, vec![best.clone()], Vec::new())?,
        None => best.clone(),
    };
    for item in items.into_iter().skip(1) {
        let k = match &key {
            Some(f) => interp.call(f, vec![item.clone()], Vec::new())?,
            None => item.clone(),
        };
        let ord = match k.py_cmp(&best_key) {
            Some(o) => o,
            None if k.is_number() && best_key.is_number() => Ordering::Equal,
            None => {
                return Err(interp.error(
                    "TypeError",
                    format!(
                        "'<' not supported between instances of '{}' and '{}'",
                        k.type_name(),
                        best_key.type_name()
                    ),
                ))
            }
        };
        if ord == want {
            best = item;
            best_key = k;
        }
    }
    Ok(best)
}

fn parse_int(interp: &Interpreter, s: &str, base: u32) -> Result<i64, Exc> {
    let t = s.trim().replace('_', "");
    i64::from_str_radix(&t, base)
        .map_err(|_| interp.error("ValueError", format!("invalid literal for int() with base {base}: {}", str_repr(s))))
}

fn parse_float(interp: &Interpreter, s: &str) -> Result<f64, Exc> {
    let t = s.trim().to_ascii_lowercase();
    match t.as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        "nan" | "+nan" | "-nan" => return Ok(f64::NAN),
        _ => {}
    }
    t.replace('_', "")
        .parse::<f64>()
        .map_err(|_| interp.error("ValueError", format!("could not convert string to float: {}", str_repr(s))))
}

pub fn round_half_even(x: f64) -> f64 {
    let r = x.round();
    if (x - x.trunc()).abs() == 0.5 {
        2.0 * (x / 2.0).round()
    } else {
        r
    }
}

fn builtin(interp: &mut Interpreter, name: &str, f: impl Fn(&mut Interpreter, Vec<Value>, Kwargs) -> Result<Value, Exc> + 'static) {
    interp.set_builtin(name, Builtin::value(name, f));
}

pub(crate) fn install(interp: &mut Interpreter) {
    builtin(interp, "print", |i, args, kwargs| {
        let mut sep = " ".to_string();
        let mut end = "\n".to_string();
        for (k, v) in kwargs {
            match k.as_str() {
                "sep" => sep = if v.is_none() { " ".into() } else { v.to_str() },
                "end" => end = if v.is_none() { "\n".into() } else { v.to_str() },
                "flush" | "file" => {}
                _ => return Err(i.error("TypeError", format!("print() got an unexpected keyword argument '{k}'"))),
            }
        }
        let text: Vec<String> = args.iter().map(Value::to_str).collect();
        i.stdout.push_str(&text.join(&sep));
        i.stdout.push_str(&end);
        Ok(Value::None)
    });
    builtin(interp, "len", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "len", &["obj"], args, kw)?).unwrap();
        let n = match &v {
            Value::Str(s) => s.chars().count(),
            Value::List(l) | Value::Set(l) => l.borrow().len(),
            Value::Tuple(t) => t.len(),
            Value::Dict(d) => d.borrow().len(),
            Value::Range(a, b, s) => range_len(*a, *b, *s) as usize,
            Value::Native(_) => i.iterate(&v)?.len(),
            other => return Err(i.error("TypeError", format!("object of type '{}' has no len()", other.type_name()))),
        };
        Ok(Value::Int(n as i64))
    });
    builtin(interp, "range", |i, args, kw| {
        if !kw.is_empty() {
            return Err(i.error("TypeError", "range() takes no keyword arguments"));
        }
        let ints: Vec<i64> = args.iter().map(|a| expect_int(i, a, "range() argument")).collect::<Result<_, _>>()?;
        let (a, b, s) = match ints.as_slice() {
            [b] => (0, *b, 1),
            [a, b] => (*a, *b, 1),
            [a, b, s] => (*a, *b, *s),
            _ => return Err(i.error("TypeError", format!("range expected 1 to 3 arguments, got {}", ints.len()))),
        };
        if s == 0 {
            return Err(i.error("ValueError", "range() arg 3 must not be zero"));
        }
        Ok(Value::Range(a, b, s))
    });
    builtin(interp, "abs", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "abs", &["x"], args, kw)?).unwrap();
        match v {
            Value::Float(f) => Ok(Value::Float(f.abs())),
            v if v.as_int().is_some() => v
                .as_int()
                .unwrap()
                .checked_abs()
                .map(Value::Int)
                .ok_or_else(|| i.error("OverflowError", "integer overflow")),
            v => Err(i.error("TypeError", format!("bad operand type for abs(): '{}'", v.type_name()))),
        }
    });
    builtin(interp, "min", |i, a, k| min_max(i, "min", a, k, Ordering::Less));
    builtin(interp, "max", |i, a, k| min_max(i, "max", a, k, Ordering::Greater));
    builtin(interp, "sum", |i, args, kw| {
        let slots = bind(i, "sum", &["iterable", "start"], args, kw)?;
        let items = match &slots[0] {
            Some(v) => i.iterate(v)?,
            None => return Err(i.error("TypeError", "sum() takes at least 1 positional argument (0 given)")),
        };
        let mut acc = slots[1].clone().unwrap_or(Value::Int(0));
        for v in items {
            acc = i.binop(crate::ast::BinOp::Add, &acc, &v)?;
        }
        Ok(acc)
    });
    builtin(interp, "int", |i, args, kw| {
        let slots = bind(i, "int", &["x", "base"], args, kw)?;
        let base = match &slots[1] {
            Some(b) => expect_int(i, b, "base")? as u32,
            None => 10,
        };
        match slots[0].clone().unwrap_or(Value::Int(0)) {
            Value::Float(f) => {
                if !f.is_finite() {
                    let what = if f.is_nan() { "ValueError" } else { "OverflowError" };
                    return Err(i.error(what, "cannot convert float to integer"));
                }
                Ok(Value::Int(f.trunc() as i64))
            }
            Value::Str(s) => parse_int(i, &s, base).map(Value::Int),
            v if v.as_int().is_some() => Ok(Value::Int(v.as_int().unwrap())),
            v => Err(i.error(
                "TypeError",
                format!("int() argument must be a string or a real number, not '{}'", v.type_name()),
            )),
        }
    });
    builtin(interp, "float", |i, args, kw| {
        let slots = bind(i, "float", &["x"], args, kw)?;
        match slots[0].clone().unwrap_or(Value::Float(0.0)) {
            Value::Str(s) => parse_float(i, &s).map(Value::Float),
            v => v.as_f64().map(Value::Float).ok_or_else(|| {
                i.error(
                    "TypeError",
                    format!("float() argument must be a string or a real number, not '{}'", v.type_name()),
                )
            }),
        }
    });
    builtin(interp, "str", |i, args, kw| {
        let slots = bind(i, "str", &["object"], args, kw)?;
        Ok(Value::str(slots[0].as_ref().map(Value::to_str).unwrap_or_default()))
    });
    builtin(interp, "repr", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "repr", &["obj"], args, kw)?).unwrap();
        Ok(Value::str(v.repr()))
    });
    builtin(interp, "bool", |i, args, kw| {
        let slots = bind(i, "bool", &["x"], args, kw)?;
        Ok(Value::Bool(slots[0].as_ref().is_some_and(Value::truthy)))
    });
    builtin(interp, "list", |i, args, kw| {
        let slots = bind(i, "list", &["iterable"], args, kw)?;
        Ok(Value::list(match &slots[0] {
            Some(v) => i.iterate(v)?,
            None => Vec::new(),
        }))
    });
    builtin(interp, "tuple", |i, args, kw| {
        let slots = bind(i, "tuple", &["iterable"], args, kw)?;
        Ok(Value::tuple(match &slots[0] {
            Some(v) => i.iterate(v)?,
            None => Vec::new(),
        }))
    });
    builtin(interp, "set", |i, args, kw| {
        let slots = bind(i, "set", &["iterable"], args, kw)?;
        let mut out: Vec<Value> = Vec::new();
        if let Some(v) = &slots[0] {
            for x in i.iterate(v)? {
                if !out.iter().any(|y| y.py_eq(&x)) {
                    out.push(x);
                }
            }
        }
        Ok(Value::Set(Rc::new(RefCell::new(out))))
    });
    builtin(interp, "dict", |i, args, kw| {
        let mut d = Dict::default();
        if let Some(src) = args.first() {
            match src {
                Value::Dict(other) => d = other.borrow().clone(),
                other => {
                    for pair in i.iterate(other)? {
                        let kv = i.iterate(&pair)?;
                        if kv.len() != 2 {
                            return Err(i.error("ValueError", "dictionary update sequence element has wrong length"));
                        }
                        d.insert(kv[0].clone(), kv[1].clone());
                    }
                }
            }
        }
        for (k, v) in kw {
            d.insert(Value::str(k), v);
        }
        Ok(Value::Dict(Rc::new(RefCell::new(d))))
    });
    builtin(interp, "isinstance", |i, args, kw| {
        let [v, cls] = <[Value; 2]>::try_from(bind_required(i, "isinstance", &["obj", "class_or_tuple"], args, kw)?).unwrap();
        is_instance(i, &v, &cls).map(Value::Bool)
    });
    builtin(interp, "callable", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "callable", &["obj"], args, kw)?).unwrap();
        Ok(Value::Bool(matches!(
            v,
            Value::Function(_) | Value::Builtin(_) | Value::BoundMethod(_) | Value::ExcClass(_) | Value::Native(_)
        )))
    });
    builtin(interp, "type", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "type", &["obj"], args, kw)?).unwrap();
        let name = v.type_name();
        match &v {
            Value::Exception(e) => Ok(Value::ExcClass(e.0.class.clone())),
            _ => {
                let shown = name.clone();
                Ok(Builtin::value(name, move |i, _, _| {
                    Err(i.error("TypeError", format!("cannot create '{shown}' instances")))
                }))
            }
        }
    });
    builtin(interp, "round", |i, args, kw| {
        let slots = bind(i, "round", &["number", "ndigits"], args, kw)?;
        let Some(x) = slots[0].clone() else {
            return Err(i.error("TypeError", "round() missing required argument 'number'"));
        };
        let nd = match &slots[1] {
            None | Some(Value::None) => None,
            Some(v) => Some(expect_int(i, v, "ndigits")?),
        };
        if let Some(n) = x.as_int() {
            return Ok(Value::Int(n));
        }
        let f = expect_float(i, &x, "round() argument")?;
        match nd {
            None => {
                if !f.is_finite() {
                    return Err(i.error("OverflowError", "cannot convert float infinity to integer"));
                }
                Ok(Value::Int(round_half_even(f) as i64))
            }
            Some(n) => {
                let s = format!("{:.*}", n.max(0) as usize, f);
                Ok(Value::Float(s.parse().unwrap_or(f)))
            }
        }
    });
    builtin(interp, "sorted", |i, args, kw| {
        let slots = bind(i, "sorted", &["iterable", "key", "reverse"], args, kw)?;
        let Some(src) = &slots[0] else {
            return Err(i.error("TypeError", "sorted expected 1 argument, got 0"));
        };
        let mut items = i.iterate(src)?;
        let reverse = slots[2].as_ref().is_some_and(Value::truthy);
        sort_values(i, &mut items, slots[1].as_ref(), reverse)?;
        Ok(Value::list(items))
    });
    builtin(interp, "reversed", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "reversed", &["seq"], args, kw)?).unwrap();
        let mut items = i.iterate(&v)?;
        items.reverse();
        Ok(Value::list(items))
    });
    builtin(interp, "enumerate", |i, args, kw| {
        let slots = bind(i, "enumerate", &["iterable", "start"], args, kw)?;
        let Some(src) = &slots[0] else {
            return Err(i.error("TypeError", "enumerate() missing required argument 'iterable'"));
        };
        let start = match &slots[1] {
            Some(v) => expect_int(i, v, "start")?,
            None => 0,
        };
        let items = i.iterate(src)?;
        Ok(Value::list(
            items.into_iter().enumerate().map(|(k, v)| Value::tuple(vec![Value::Int(start + k as i64), v])).collect(),
        ))
    });
    builtin(interp, "zip", |i, args, _| {
        let mut cols = Vec::new();
        for a in &args {
            cols.push(i.iterate(a)?);
        }
        let n = cols.iter().map(Vec::len).min().unwrap_or(0);
        Ok(Value::list((0..n).map(|k| Value::tuple(cols.iter().map(|c| c[k].clone()).collect())).collect()))
    });
    builtin(interp, "any", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "any", &["iterable"], args, kw)?).unwrap();
        Ok(Value::Bool(i.iterate(&v)?.iter().any(Value::truthy)))
    });
    builtin(interp, "all", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "all", &["iterable"], args, kw)?).unwrap();
        Ok(Value::Bool(i.iterate(&v)?.iter().all(Value::truthy)))
    });
    builtin(interp, "map", |i, args, _| {
        let Some((f, rest)) = args.split_first() else {
            return Err(i.error("TypeError", "map() must have at least two arguments."));
        };
        let mut cols = Vec::new();
        for a in rest {
            cols.push(i.iterate(a)?);
        }
        let n = cols.iter().map(Vec::len).min().unwrap_or(0);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(i.call(f, cols.iter().map(|c| c[k].clone()).collect(), Vec::new())?);
        }
        Ok(Value::list(out))
    });
    builtin(interp, "filter", |i, args, kw| {
        let [f, src] = <[Value; 2]>::try_from(bind_required(i, "filter", &["function", "iterable"], args, kw)?).unwrap();
        let mut out = Vec::new();
        for v in i.iterate(&src)? {
            let keep = if f.is_none() { v.truthy() } else { i.call(&f, vec![v.clone()], Vec::new())?.truthy() };
            if keep {
                out.push(v);
            }
        }
        Ok(Value::list(out))
    });
    builtin(interp, "hasattr", |i, args, kw| {
        let [o, n] = <[Value; 2]>::try_from(bind_required(i, "hasattr", &["obj", "name"], args, kw)?).unwrap();
        let name = n.to_str();
        match i.get_attr(&o, &name) {
            Ok(_) => Ok(Value::Bool(true)),
            Err(e) if e.is_named("AttributeError") => Ok(Value::Bool(false)),
            Err(e) => Err(e),
        }
    });
    builtin(interp, "getattr", |i, args, kw| {
        let slots = bind(i, "getattr", &["obj", "name", "default"], args, kw)?;
        let (Some(o), Some(n)) = (&slots[0], &slots[1]) else {
            return Err(i.error("TypeError", "getattr expected at least 2 arguments"));
        };
        match (i.get_attr(o, &n.to_str()), &slots[2]) {
            (Err(e), Some(d)) if e.is_named("AttributeError") => Ok(d.clone()),
            (r, _) => r,
        }
    });
    builtin(interp, "setattr", |i, args, kw| {
        let [o, n, v] = <[Value; 3]>::try_from(bind_required(i, "setattr", &["obj", "name", "value"], args, kw)?).unwrap();
        i.set_attr(&o, &n.to_str(), v)?;
        Ok(Value::None)
    });
    builtin(interp, "divmod", |i, args, kw| {
        let [a, b] = <[Value; 2]>::try_from(bind_required(i, "divmod", &["a", "b"], args, kw)?).unwrap();
        let q = i.binop(crate::ast::BinOp::FloorDiv, &a, &b)?;
        let r = i.binop(crate::ast::BinOp::Mod, &a, &b)?;
        Ok(Value::tuple(vec![q, r]))
    });
    builtin(interp, "pow", |i, args, kw| {
        let [a, b] = <[Value; 2]>::try_from(bind_required(i, "pow", &["base", "exp"], args, kw)?).unwrap();
        i.binop(crate::ast::BinOp::Pow, &a, &b)
    });
    builtin(interp, "chr", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "chr", &["i"], args, kw)?).unwrap();
        let n = expect_int(i, &v, "chr() argument")?;
        char::from_u32(n as u32)
            .map(|c| Value::str(c.to_string()))
            .ok_or_else(|| i.error("ValueError", "chr() arg not in range(0x110000)"))
    });
    builtin(interp, "ord", |i, args, kw| {
        let [v] = <[Value; 1]>::try_from(bind_required(i, "ord", &["c"], args, kw)?).unwrap();
        let s = v.to_str();
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Ok(Value::Int(c as i64)),
            _ => Err(i.error("TypeError", "ord() expected a character")),
        }
    });
    builtin(interp, "object", |_, _, _| Ok(Value::None));
}

// ---------------------------------------------------------------- methods of built-in types

const STR_METHODS: &[&str] = &[
    "format", "join", "split", "rsplit", "strip", "lstrip", "rstrip", "lower", "upper", "startswith", "endswith",
    "replace", "find", "index", "count", "isdigit", "isalpha", "isnumeric", "splitlines", "title", "capitalize",
    "ljust", "rjust", "center", "zfill",
];
const LIST_METHODS: &[&str] =
    &["append", "extend", "pop", "insert", "remove", "index", "count", "sort", "reverse", "copy", "clear"];
const DICT_METHODS: &[&str] = &["get", "keys", "values", "items", "setdefault", "update", "pop", "copy", "clear"];
const SET_METHODS: &[&str] = &["add", "discard", "remove", "union", "intersection", "difference", "copy", "clear"];

pub fn has_type_method(v: &Value, name: &str) -> bool {
    match v {
        Value::Str(_) => STR_METHODS.contains(&name),
        Value::List(_) => LIST_METHODS.contains(&name),
        Value::Dict(_) => DICT_METHODS.contains(&name),
        Value::Set(_) => SET_METHODS.contains(&name),
        Value::Tuple(_) => matches!(name, "index" | "count"),
        Value::Float(_) => name == "is_integer",
        _ => false,
    }
}

pub fn call_type_method(
    interp: &mut Interpreter,
    recv: &Value,
    name: &str,
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Value, Exc> {
    if !has_type_method(recv, name) {
        let f = interp.get_attr(recv, name)?;
        return interp.call(&f, args, kwargs);
    }
    match recv {
        Value::Str(s) => str_method(interp, s, name, args, kwargs),
        Value::List(l) => list_method(interp, l, name, args, kwargs),
        Value::Dict(d) => dict_method(interp, d, name, args, kwargs),
        Value::Set(s) => set_method(interp, s, name, args, kwargs),
        Value::Tuple(t) => {
            let [x] = <[Value; 1]>::try_from(bind_required(interp, name, &["value"], args, kwargs)?).unwrap();
            match name {
                "count" => Ok(Value::Int(t.iter().filter(|v| v.py_eq(&x)).count() as i64)),
                _ => t
                    .iter()
                    .position(|v| v.py_eq(&x))
                    .map(|p| Value::Int(p as i64))
                    .ok_or_else(|| interp.error("ValueError", "tuple.index(x): x not in tuple")),
            }
        }
        Value::Float(f) => Ok(Value::Bool(f.is_finite() && f.fract() == 0.0)),
        _ => unreachable!("has_type_method covers receivers"),
    }
}

fn str_method(interp: &mut Interpreter, s: &Rc<str>, name: &str, args: Vec<Value>, kwargs: Kwargs) -> Result<Value, Exc> {
    let s: &str = s;
    let arg_str = |interp: &Interpreter, v: &Option<Value>, what: &str| -> Result<Option<String>, Exc> {
        match v {
            None | Some(Value::None) => Ok(None),
            Some(Value::Str(x)) => Ok(Some(x.to_string())),
            Some(other) => Err(interp.error("TypeError", format!("{what} must be str, not {}", other.type_name()))),
        }
    };
    match name {
        "format" => format_method(interp, s, &args, &kwargs).map(Value::str),
        "join" => {
            let [it] = <[Value; 1]>::try_from(bind_required(interp, "join", &["iterable"], args, kwargs)?).unwrap();
            let mut parts = Vec::new();
            for v in interp.iterate(&it)? {
                match v {
                    Value::Str(p) => parts.push(p.to_string()),
                    other => {
                        return Err(interp.error(
                            "TypeError",
                            format!("sequence item {}: expected str instance, {} found", parts.len(), other.type_name()),
                        ))
                    }
                }
            }
            Ok(Value::str(parts.join(s)))
        }
        "split" | "rsplit" => {
            let slots = bind(interp, name, &["sep", "maxsplit"], args, kwargs)?;
            let sep = arg_str(interp, &slots[0], "sep")?;
            let max = match &slots[1] {
                Some(v) => expect_int(interp, v, "maxsplit")?,
                None => -1,
            };
            let parts: Vec<String> = match (&sep, max) {
                (Some(sep), m) if m < 0 => s.split(sep.as_str()).map(str::to_string).collect(),
                (Some(sep), m) if name == "split" => s.splitn(m as usize + 1, sep.as_str()).map(str::to_string).collect(),
                (Some(sep), m) => {
                    let mut v: Vec<String> = s.rsplitn(m as usize + 1, sep.as_str()).map(str::to_string).collect();
                    v.reverse();
                    v
                }
                (None, _) => s.split_whitespace().map(str::to_string).collect(),
            };
            Ok(Value::list(parts.into_iter().map(Value::str).collect()))
        }
        "strip" | "lstrip" | "rstrip" => {
            let slots = bind(interp, name, &["chars"], args, kwargs)?;
            let chars = arg_str(interp, &slots[0], "chars")?;
            let pred = |c: char| match &chars {
                Some(set) => set.contains(c),
                None => c.is_whitespace(),
            };
            Ok(Value::str(match name {
                "strip" => s.trim_matches(pred),
                "lstrip" => s.trim_start_matches(pred),
                _ => s.trim_end_matches(pred),
            }))
        }
        "lower" => Ok(Value::str(s.to_lowercase())),
        "upper" => Ok(Value::str(s.to_uppercase())),
        "title" | "capitalize" => {
            let mut out = String::new();
            let mut start = true;
            for c in s.chars() {
                if start {
                    out.extend(c.to_uppercase());
                } else if name == "title" || !c.is_alphabetic() {
                    out.push(c);
                } else {
                    out.extend(c.to_lowercase());
                }
                start = if name == "title" { !c.is_alphabetic() } else { false };
            }
            Ok(Value::str(out))
        }
        "startswith" | "endswith" => {
            let [p] = <[Value; 1]>::try_from(bind_required(interp, name, &["prefix"], args, kwargs)?).unwrap();
            let candidates = match &p {
                Value::Tuple(t) => t.iter().map(Value::to_str).collect(),
                Value::Str(x) => vec![x.to_string()],
                other => {
                    return Err(interp.error(
                        "TypeError",
                        format!("{name} first arg must be str or a tuple of str, not {}", other.type_name()),
                    ))
                }
            };
            Ok(Value::Bool(
                candidates.iter().any(|c| if name == "startswith" { s.starts_with(c.as_str()) } else { s.ends_with(c.as_str()) }),
            ))
        }
        "replace" => {
            let [a, b] = <[Value; 2]>::try_from(bind_required(interp, "replace", &["old", "new"], args, kwargs)?).unwrap();
            Ok(Value::str(s.replace(&a.to_str(), &b.to_str())))
        }
        "find" | "index" | "count" => {
            let [sub] = <[Value; 1]>::try_from(bind_required(interp, name, &["sub"], args, kwargs)?).unwrap();
            let sub = sub.to_str();
            if name == "count" {
                return Ok(Value::Int(s.matches(sub.as_str()).count() as i64));
            }
            match s.find(sub.as_str()) {
                Some(b) => Ok(Value::Int(s[..b].chars().count() as i64)),
                None if name == "find" => Ok(Value::Int(-1)),
                None => Err(interp.error("ValueError", "substring not found")),
            }
        }
        "isdigit" | "isnumeric" => Ok(Value::Bool(!s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))),
        "isalpha" => Ok(Value::Bool(!s.is_empty() && s.chars().all(char::is_alphabetic))),
        "splitlines" => Ok(Value::list(s.lines().map(Value::str).collect())),
        "ljust" | "rjust" | "center" | "zfill" => {
            let slots = bind(interp, name, &["width", "fillchar"], args, kwargs)?;
            let width = match &slots[0] {
                Some(v) => expect_int(interp, v, "width")?.max(0) as usize,
                None => return Err(interp.error("TypeError", format!("{name}() missing required argument 'width'"))),
            };
            let fill = arg_str(interp, &slots[1], "fillchar")?.and_then(|f| f.chars().next()).unwrap_or(' ');
            let align = match name {
                "ljust" => '<',
                "rjust" => '>',
                "zfill" => '=',
                _ => '^',
            };
            let fill = if name == "zfill" { '0' } else { fill };
            Ok(Value::str(pad(s, width, fill, align)))
        }
        _ => unreachable!("unlisted str method {name}"),
    }
}

fn list_method(
    interp: &mut Interpreter,
    l: &Rc<RefCell<Vec<Value>>>,
    name: &str,
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Value, Exc> {
    match name {
        "append" => {
            let [v] = <[Value; 1]>::try_from(bind_required(interp, "append", &["object"], args, kwargs)?).unwrap();
            l.borrow_mut().push(v);
            Ok(Value::None)
        }
        "extend" => {
            let [v] = <[Value; 1]>::try_from(bind_required(interp, "extend", &["iterable"], args, kwargs)?).unwrap();
            let items = interp.iterate(&v)?;
            l.borrow_mut().extend(items);
            Ok(Value::None)
        }
        "pop" => {
            let slots = bind(interp, "pop", &["index"], args, kwargs)?;
            let n = l.borrow().len() as i64;
            if n == 0 {
                return Err(interp.error("IndexError", "pop from empty list"));
            }
            let i = match &slots[0] {
                Some(v) => expect_int(interp, v, "index")?,
                None => -1,
            };
            let j = if i < 0 { i + n } else { i };
            if j < 0 || j >= n {
                return Err(interp.error("IndexError", "pop index out of range"));
            }
            Ok(l.borrow_mut().remove(j as usize))
        }
        "insert" => {
            let [i, v] = <[Value; 2]>::try_from(bind_required(interp, "insert", &["index", "object"], args, kwargs)?).unwrap();
            let n = l.borrow().len() as i64;
            let i = expect_int(interp, &i, "index")?;
            let j = if i < 0 { (i + n).max(0) } else { i.min(n) };
            l.borrow_mut().insert(j as usize, v);
            Ok(Value::None)
        }
        "remove" | "index" | "count" => {
            let [x] = <[Value; 1]>::try_from(bind_required(interp, name, &["value"], args, kwargs)?).unwrap();
            if name == "count" {
                return Ok(Value::Int(l.borrow().iter().filter(|v| v.py_eq(&x)).count() as i64));
            }
            let pos = l.borrow().iter().position(|v| v.py_eq(&x));
            match (pos, name) {
                (Some(p), "remove") => {
                    l.borrow_mut().remove(p);
                    Ok(Value::None)
                }
                (Some(p), _) => Ok(Value::Int(p as i64)),
                (None, "remove") => Err(interp.error("ValueError", "list.remove(x): x not in list")),
                (None, _) => Err(interp.error("ValueError", format!("{} is not in list", x.repr()))),
            }
        }
        "sort" => {
            let slots = bind(interp, "sort", &["key", "reverse"], Vec::new(), kwargs)?;
            if !args.is_empty() {
                return Err(interp.error("TypeError", "sort() takes no positional arguments"));
            }
            let mut items = l.borrow().clone();
            sort_values(interp, &mut items, slots[0].as_ref(), slots[1].as_ref().is_some_and(Value::truthy))?;
            *l.borrow_mut() = items;
            Ok(Value::None)
        }
        "reverse" => {
            l.borrow_mut().reverse();
            Ok(Value::None)
        }
        "copy" => Ok(Value::list(l.borrow().clone())),
        "clear" => {
            l.borrow_mut().clear();
            Ok(Value::None)
        }
        _ => unreachable!("unlisted list method {name}"),
    }
}

fn dict_method(
    interp: &mut Interpreter,
    d: &Rc<RefCell<Dict>>,
    name: &str,
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Value, Exc> {
    match name {
        "get" => {
            let slots = bind(interp, "get", &["key", "default"], args, kwargs)?;
            let Some(k) = &slots[0] else {
                return Err(interp.error("TypeError", "get expected at least 1 argument, got 0"));
            };
            Ok(d.borrow().get(k).cloned().or_else(|| slots[1].clone()).unwrap_or(Value::None))
        }
        "keys" => Ok(Value::list(d.borrow().entries.iter().map(|(k, _)| k.clone()).collect())),
        "values" => Ok(Value::list(d.borrow().entries.iter().map(|(_, v)| v.clone()).collect())),
        "items" => Ok(Value::list(
            d.borrow().entries.iter().map(|(k, v)| Value::tuple(vec![k.clone(), v.clone()])).collect(),
        )),
        "setdefault" => {
            let slots = bind(interp, "setdefault", &["key", "default"], args, kwargs)?;
            let Some(k) = slots[0].clone() else {
                return Err(interp.error("TypeError", "setdefault expected at least 1 argument, got 0"));
            };
            let existing = d.borrow().get(&k).cloned();
            match existing {
                Some(v) => Ok(v),
                None => {
                    let v = slots[1].clone().unwrap_or(Value::None);
                    d.borrow_mut().insert(k, v.clone());
                    Ok(v)
                }
            }
        }
        "update" => {
            if let Some(src) = args.first() {
                let pairs: Vec<(Value, Value)> = match src {
                    Value::Dict(o) => o.borrow().entries.clone(),
                    other => {
                        let mut out = Vec::new();
                        for p in interp.iterate(other)? {
                            let kv = interp.iterate(&p)?;
                            if kv.len() != 2 {
                                return Err(interp.error("ValueError", "dictionary update sequence element has wrong length"));
                            }
                            out.push((kv[0].clone(), kv[1].clone()));
                        }
                        out
                    }
                };
                for (k, v) in pairs {
                    d.borrow_mut().insert(k, v);
                }
            }
            for (k, v) in kwargs {
                d.borrow_mut().insert(Value::str(k), v);
            }
            Ok(Value::None)
        }
        "pop" => {
            let slots = bind(interp, "pop", &["key", "default"], args, kwargs)?;
            let Some(k) = &slots[0] else {
                return Err(interp.error("TypeError", "pop expected at least 1 argument, got 0"));
            };
            let removed = d.borrow_mut().remove(k);
            match (removed, &slots[1]) {
                (Some(v), _) => Ok(v),
                (None, Some(dflt)) => Ok(dflt.clone()),
                (None, None) => {
                    let e = Exc::new(interp.exc_class("KeyError"), vec![k.clone()]);
                    e.0.line.set(Some(interp.current_line()));
                    Err(e)
                }
            }
        }
        "copy" => Ok(Value::Dict(Rc::new(RefCell::new(d.borrow().clone())))),
        "clear" => {
            d.borrow_mut().entries.clear();
            Ok(Value::None)
        }
        _ => unreachable!("unlisted dict method {name}"),
    }
}

fn set_method(
    interp: &mut Interpreter,
    s: &Rc<RefCell<Vec<Value>>>,
    name: &str,
    args: Vec<Value>,
    kwargs: Kwargs,
) -> Result<Value, Exc> {
    match name {
        "add" | "discard" | "remove" => {
            let [v] = <[Value; 1]>::try_from(bind_required(interp, name, &["elem"], args, kwargs)?).unwrap();
            let pos = s.borrow().iter().position(|x| x.py_eq(&v));
            match (name, pos) {
                ("add", None) => s.borrow_mut().push(v),
                ("add", Some(_)) => {}
                (_, Some(p)) => {
                    s.borrow_mut().remove(p);
                }
                ("remove", None) => {
                    let e = Exc::new(interp.exc_class("KeyError"), vec![v]);
                    return Err(e);
                }
                _ => {}
            }
            Ok(Value::None)
        }
        "union" | "intersection" | "difference" => {
            let [o] = <[Value; 1]>::try_from(bind_required(interp, name, &["other"], args, kwargs)?).unwrap();
            let other = interp.iterate(&o)?;
            let mine = s.borrow().clone();
            let out: Vec<Value> = match name {
                "union" => {
                    let mut out = mine;
                    for v in other {
                        if !out.iter().any(|x| x.py_eq(&v)) {
                            out.push(v);
                        }
                    }
                    out
                }
                "intersection" => mine.into_iter().filter(|v| other.iter().any(|x| x.py_eq(v))).collect(),
                _ => mine.into_iter().filter(|v| !other.iter().any(|x| x.py_eq(v))).collect(),
            };
            Ok(Value::Set(Rc::new(RefCell::new(out))))
        }
        "copy" => Ok(Value::Set(Rc::new(RefCell::new(s.borrow().clone())))),
        "clear" => {
            s.borrow_mut().clear();
            Ok(Value::None)
        }
        _ => unreachable!("unlisted set method {name}"),
    }
}

// ---------------------------------------------------------------- formatting

struct Spec {
    fill: char,
    align: Option<char>,
    sign: char,
    zero: bool,
    width: usize,
    grouping: bool,
    precision: Option<usize>,
    kind: Option<char>,
}

fn parse_spec(interp: &Interpreter, spec: &str) -> Result<Spec, Exc> {
    let chars: Vec<char> = spec.chars().collect();
    let mut i = 0;
    let mut out = Spec { fill: ' ', align: None, sign: '-', zero: false, width: 0, grouping: false, precision: None, kind: None };
    let is_align = |c: char| matches!(c, '<' | '>' | '^' | '=');
    if chars.len() >= 2 && is_align(chars[1]) {
        out.fill = chars[0];
        out.align = Some(chars[1]);
        i = 2;
    } else if !chars.is_empty() && is_align(chars[0]) {
        out.align = Some(chars[0]);
        i = 1;
    }
    if i < chars.len() && matches!(chars[i], '+' | '-' | ' ') {
        out.sign = chars[i];
        i += 1;
    }
    if i < chars.len() && chars[i] == '#' {
        i += 1;
    }
    if i < chars.len() && chars[i] == '0' {
        out.zero = true;
        i += 1;
    }
    let start = i;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if i > start {
        out.width = chars[start..i].iter().collect::<String>().parse().unwrap_or(0);
    }
    if i < chars.len() && matches!(chars[i], ',' | '_') {
        out.grouping = true;
        i += 1;
    }
    if i < chars.len() && chars[i] == '.' {
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return Err(interp.error("ValueError", "Format specifier missing precision"));
        }
        out.precision = Some(chars[start..i].iter().collect::<String>().parse().unwrap_or(0));
    }
    if i < chars.len() {
        out.kind = Some(chars[i]);
        i += 1;
    }
    if i != chars.len() {
        return Err(interp.error("ValueError", format!("Invalid format specifier '{spec}'")));
    }
    Ok(out)
}

fn pad(s: &str, width: usize, fill: char, align: char) -> String {
    let len = s.chars().count();
    if len >= width {
        return s.to_string();
    }
    let gap = width - len;
    let f = |n: usize| fill.to_string().repeat(n);
    match align {
        '<' => format!("{s}{}", f(gap)),
        '^' => format!("{}{s}{}", f(gap / 2), f(gap - gap / 2)),
        '=' => {
            let (sign, rest) = match s.chars().next() {
                Some(c @ ('+' | '-' | ' ')) => (c.to_string(), &s[1..]),
                _ => (String::new(), s),
            };
            format!("{sign}{}{rest}", f(gap))
        }
        _ => format!("{}{s}", f(gap)),
    }
}

fn group_thousands(digits: &str) -> String {
    let (int, frac) = match digits.find('.') {
        Some(p) => (&digits[..p], &digits[p..]),
        None => (digits, ""),
    };
    let mut out = String::new();
    for (k, c) in int.chars().enumerate() {
        if k > 0 && (int.len() - k) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out + frac
}

fn exp_python(mantissa_exp: &str) -> String {
    let (m, e) = mantissa_exp.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("integer exponent");
    format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn format_general(x: f64, precision: usize) -> String {
    let p = precision.max(1);
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", p - 1, x);
    let exp: i32 = sci.split_once('e').unwrap().1.parse().unwrap();
    if exp >= -4 && exp < p as i32 {
        let s = format!("{:.*}", (p as i32 - 1 - exp).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let (m, _) = sci.split_once('e').unwrap();
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        exp_python(&format!("{m}e{exp}"))
    }
}

fn float_body(x: f64, spec: &Spec) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return "inf".into();
    }
    let x = x.abs();
    match spec.kind {
        Some('f') | Some('F') => format!("{:.*}", spec.precision.unwrap_or(6), x),
        Some('e') | Some('E') => exp_python(&format!("{:.*e}", spec.precision.unwrap_or(6), x)),
        Some('%') => format!("{:.*}%", spec.precision.unwrap_or(6), x * 100.0),
        Some('g') | Some('G') => format_general(x, spec.precision.unwrap_or(6)),
        _ => match spec.precision {
            Some(p) => format_general(x, p),
            None => float_repr(x),
        },
    }
}

pub fn format_value(interp: &mut Interpreter, v: &Value, spec: &str) -> Result<String, Exc> {
    if spec.is_empty() {
        return Ok(v.to_str());
    }
    let spec = parse_spec(interp, spec)?;
    let numeric = v.is_number() && !matches!(spec.kind, Some('s'));
    let body = if numeric {
        let (neg, mut digits) = match (v, spec.kind) {
            (v, Some('d')) => match v.as_int() {
                Some(i) => (i < 0, i.unsigned_abs().to_string()),
                None => return Err(interp.error("ValueError", "Unknown format code 'd' for object of type 'float'")),
            },
            (Value::Float(f), _) => (f.is_sign_negative() && !f.is_nan(), float_body(*f, &spec)),
            (v, None) => {
                let i = v.as_int().unwrap();
                (i < 0, i.unsigned_abs().to_string())
            }
            (v, Some(_)) => (v.as_f64().unwrap() < 0.0, float_body(v.as_f64().unwrap(), &spec)),
        };
        if spec.grouping {
            digits = group_thousands(&digits);
        }
        let sign = match (neg, spec.sign) {
            (true, _) => "-",
            (false, '+') => "+",
            (false, ' ') => " ",
            _ => "",
        };
        format!("{sign}{digits}")
    } else {
        if let Some(k) = spec.kind.filter(|k| *k != 's') {
            return Err(interp.error(
                "ValueError",
                format!("Unknown format code '{k}' for object of type '{}'", v.type_name()),
            ));
        }
        let s = v.to_str();
        match spec.precision {
            Some(p) => s.chars().take(p).collect(),
            None => s,
        }
    };
    let (fill, align) = if spec.zero && spec.align.is_none() {
        ('0', '=')
    } else {
        (spec.fill, spec.align.unwrap_or(if numeric { '>' } else { '<' }))
    };
    Ok(pad(&body, spec.width, fill, align))
}

/// `str.format` with positional, indexed, and named fields.
pub fn format_method(interp: &mut Interpreter, fmt: &str, args: &[Value], kwargs: &Kwargs) -> Result<String, Exc> {
    let chars: Vec<char> = fmt.chars().collect();
    let mut out = String::new();
    let mut auto = 0usize;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '{' && chars.get(i + 1) == Some(&'{') {
            out.push('{');
            i += 2;
            continue;
        }
        if c == '}' && chars.get(i + 1) == Some(&'}') {
            out.push('}');
            i += 2;
            continue;
        }
        if c == '}' {
            return Err(interp.error("ValueError", "Single '}' encountered in format string"));
        }
        if c != '{' {
            out.push(c);
            i += 1;
            continue;
        }
        let Some(close) = chars[i..].iter().position(|&c| c == '}').map(|p| p + i) else {
            return Err(interp.error("ValueError", "Single '{' encountered in format string"));
        };
        let field: String = chars[i + 1..close].iter().collect();
        i = close + 1;
        let (field, spec) = match field.split_once(':') {
            Some((f, s)) => (f.to_string(), s.to_string()),
            None => (field, String::new()),
        };
        let (field, conv) = match field.split_once('!') {
            Some((f, c)) => (f.to_string(), c.chars().next()),
            None => (field, None),
        };
        let head_end = field.find(['.', '[']).unwrap_or(field.len());
        let head = &field[..head_end];
        let mut value = if head.is_empty() {
            let v = args.get(auto).cloned();
            auto += 1;
            v.ok_or_else(|| interp.error("IndexError", "Replacement index out of range for positional args tuple"))?
        } else if let Ok(n) = head.parse::<usize>() {
            args.get(n)
                .cloned()
                .ok_or_else(|| interp.error("IndexError", format!("Replacement index {n} out of range for positional args tuple")))?
        } else {
            kwargs
                .iter()
                .find(|(k, _)| k == head)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Exc::new(interp.exc_class("KeyError"), vec![Value::str(head)]))?
        };
        let mut rest = &field[head_end..];
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('.') {
                let end = r.find(['.', '[']).unwrap_or(r.len());
                value = interp.get_attr(&value, &r[..end])?;
                rest = &r[end..];
            } else if let Some(r) = rest.strip_prefix('[') {
                let end = r.find(']').ok_or_else(|| interp.error("ValueError", "Missing ']' in format string"))?;
                let key = &r[..end];
                let k = key.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::str(key));
                value = interp.get_item(&value, &k)?;
                rest = &r[end + 1..];
            } else {
                return Err(interp.error("ValueError", "Only '.' or '[' may follow ']' in format field specifier"));
            }
        }
        let value = match conv {
            Some('r') => Value::str(value.repr()),
            Some('s') => Value::str(value.to_str()),
            _ => value,
        };
        out.push_str(&format_value(interp, &value, &spec)?);
    }
    Ok(out)
}

/// printf-style `%` formatting.
pub fn percent_format(interp: &mut Interpreter, fmt: &str, args: &Value) -> Result<String, Exc> {
    let items: Vec<Value> = match args {
        Value::Tuple(t) => t.to_vec(),
        other => vec![other.clone()],
    };
    let mut it = items.into_iter();
    let chars: Vec<char> = fmt.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '%' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        i += 1;
        let start = i;
        while i < chars.len() && !chars[i].is_ascii_alphabetic() && chars[i] != '%' {
            i += 1;
        }
        let Some(&kind) = chars.get(i) else {
            return Err(interp.error("ValueError", "incomplete format"));
        };
        i += 1;
        if kind == '%' {
            out.push('%');
            continue;
        }
        let flags: String = chars[start..i - 1].iter().collect();
        let v = it.next().ok_or_else(|| interp.error("TypeError", "not enough arguments for format string"))?;
        let piece = match kind {
            's' => format_value(interp, &Value::str(v.to_str()), &flags)?,
            'r' => format_value(interp, &Value::str(v.repr()), &flags)?,
            'd' | 'i' => {
                let n = match &v {
                    Value::Float(f) => Value::Int(f.trunc() as i64),
                    other => other.clone(),
                };
                format_value(interp, &n, &format!("{flags}d"))?
            }
            'f' | 'e' | 'g' => format_value(interp, &v, &format!("{flags}{kind}"))?,
            other => return Err(interp.error("ValueError", format!("unsupported format character '{other}'"))),
        };
        let piece = if flags.starts_with('-') { piece.trim_start().to_string() } else { piece };
        out.push_str(&piece);
    }
    if it.next().is_some() {
        return Err(interp.error("TypeError", "not all arguments converted during string formatting"));
    }
    Ok(out)
}
