//! `hypothesis` and `hypothesis.strategies` for the harness.

use std::any::Any;
use std::rc::Rc;

use pbtlang::builtins::{bind, expect_float, expect_int};
use pbtlang::{Builtin, Exc, Interpreter, Kwargs, ModuleObj, NativeObject, Value};
use rand::Rng;

use super::harness::Ctx;

pub(crate) const GIVEN_ATTR: &str = "__hypothesis_given__";
pub(crate) const SETTINGS_ATTR: &str = "__hypothesis_settings__";
pub(crate) const EXAMPLES_ATTR: &str = "__hypothesis_examples__";

pub(crate) enum Kind {
    Integers(Option<i64>, Option<i64>),
    Floats { lo: Option<f64>, hi: Option<f64>, nan: bool, inf: bool, excl_lo: bool, excl_hi: bool },
    Booleans,
    Just(Value),
    Sampled(Vec<Value>),
    OneOf(Vec<Rc<Strategy>>),
    Lists { elem: Rc<Strategy>, min: usize, max: Option<usize>, unique: bool },
    Tuples(Vec<Rc<Strategy>>),
    Text { alphabet: Vec<char>, min: usize, max: Option<usize> },
    Dicts { keys: Rc<Strategy>, values: Rc<Strategy>, min: usize, max: Option<usize> },
    Fixed(Vec<(Value, Rc<Strategy>)>),
    Builds { target: Value, args: Vec<Rc<Strategy>>, kwargs: Vec<(String, Rc<Strategy>)> },
    Map(Rc<Strategy>, Value),
    Filter(Rc<Strategy>, Value),
}

pub(crate) struct Strategy {
    pub kind: Kind,
    pub repr: String,
    ctx: Rc<Ctx>,
}

const FILTER_TRIES: usize = 100;

impl Strategy {
    fn value(ctx: &Rc<Ctx>, kind: Kind, repr: String) -> Value {
        Value::native(Strategy { kind, repr, ctx: ctx.clone() })
    }

    fn rand(&self) -> f64 {
        self.ctx.rng.borrow_mut().gen::<f64>()
    }

    fn range_i(&self, lo: i64, hi: i64) -> i64 {
        self.ctx.rng.borrow_mut().gen_range(lo..=hi)
    }

    fn size(&self, min: usize, max: Option<usize>) -> usize {
        let hi = max.unwrap_or(min + 10).max(min);
        self.range_i(min as i64, hi as i64) as usize
    }

    /// Draws one value. Boundary values are favoured a little, the way
    /// hypothesis biases towards simple and extreme examples.
    pub fn draw(&self, interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(match &self.kind {
            Kind::Integers(lo, hi) => {
                let r = self.rand();
                Value::Int(match (*lo, *hi) {
                    (Some(a), Some(_)) if r < 0.1 => a,
                    (Some(a), Some(b)) if r < 0.2 => b.max(a),
                    (Some(a), Some(b)) => self.range_i(a, b),
                    (Some(a), None) if r < 0.1 => a,
                    (Some(a), None) => a.saturating_add(self.range_i(0, if r < 0.6 { 10 } else { 1000 })),
                    (None, Some(b)) if r < 0.1 => b,
                    (None, Some(b)) => b.saturating_sub(self.range_i(0, if r < 0.6 { 10 } else { 1000 })),
                    (None, None) if r < 0.3 => self.range_i(-10, 10),
                    (None, None) if r < 0.8 => self.range_i(-1000, 1000),
                    (None, None) => self.range_i(-(1 << 31), 1 << 31),
                })
            }
            Kind::Floats { lo, hi, nan, inf, excl_lo, excl_hi } => {
                for _ in 0..FILTER_TRIES {
                    let r = self.rand();
                    let x = match (*lo, *hi) {
                        _ if *nan && r < 0.03 => f64::NAN,
                        _ if *inf && r < 0.06 => match (lo, hi) {
                            (Some(_), _) => f64::INFINITY,
                            (_, Some(_)) => f64::NEG_INFINITY,
                            _ if self.rand() < 0.5 => f64::INFINITY,
                            _ => f64::NEG_INFINITY,
                        },
                        (Some(a), Some(_)) if r < 0.12 => a,
                        (Some(_), Some(b)) if r < 0.2 => b,
                        (Some(a), Some(b)) => a + (b - a) * self.rand(),
                        (Some(a), None) if r < 0.12 => a,
                        (Some(a), None) => a + wide_magnitude(self.rand(), self.rand()),
                        (None, Some(b)) if r < 0.12 => b,
                        (None, Some(b)) => b - wide_magnitude(self.rand(), self.rand()),
                        (None, None) if r < 0.15 => 0.0,
                        (None, None) => wide_magnitude(self.rand(), self.rand()) * if self.rand() < 0.5 { -1.0 } else { 1.0 },
                    };
                    let below = lo.is_some_and(|a| x < a || (*excl_lo && x == a));
                    let above = hi.is_some_and(|b| x > b || (*excl_hi && x == b));
                    if x.is_nan() || !(below || above) {
                        return Ok(Value::Float(x));
                    }
                }
                return Err(interp.error("UnsatisfiedAssumption", format!("could not draw from {}", self.repr)));
            }
            Kind::Booleans => Value::Bool(self.rand() < 0.5),
            Kind::Just(v) => v.clone(),
            Kind::Sampled(items) => items[self.range_i(0, items.len() as i64 - 1) as usize].clone(),
            Kind::OneOf(options) => {
                let s = &options[self.range_i(0, options.len() as i64 - 1) as usize];
                s.draw(interp)?
            }
            Kind::Lists { elem, min, max, unique } => {
                let n = self.size(*min, *max);
                let mut out: Vec<Value> = Vec::with_capacity(n);
                let mut tries = 0;
                while out.len() < n {
                    let v = elem.draw(interp)?;
                    if *unique && out.iter().any(|o| o.py_eq(&v)) {
                        tries += 1;
                        if tries > FILTER_TRIES {
                            if out.len() >= *min {
                                break;
                            }
                            return Err(interp.error("UnsatisfiedAssumption", "could not draw enough unique elements"));
                        }
                        continue;
                    }
                    out.push(v);
                }
                Value::list(out)
            }
            Kind::Tuples(parts) => Value::tuple(parts.iter().map(|p| p.draw(interp)).collect::<Result<_, _>>()?),
            Kind::Text { alphabet, min, max } => {
                let n = self.size(*min, *max);
                let s: String =
                    (0..n).map(|_| alphabet[self.range_i(0, alphabet.len() as i64 - 1) as usize]).collect();
                Value::str(s)
            }
            Kind::Dicts { keys, values, min, max } => {
                let n = self.size(*min, *max);
                let mut entries: Vec<(Value, Value)> = Vec::new();
                for _ in 0..n * 4 {
                    if entries.len() >= n {
                        break;
                    }
                    let k = keys.draw(interp)?;
                    if entries.iter().any(|(e, _)| e.py_eq(&k)) {
                        continue;
                    }
                    entries.push((k, values.draw(interp)?));
                }
                Value::dict(entries)
            }
            Kind::Fixed(parts) => {
                let mut entries = Vec::new();
                for (k, s) in parts {
                    entries.push((k.clone(), s.draw(interp)?));
                }
                Value::dict(entries)
            }
            Kind::Builds { target, args, kwargs } => {
                let a = args.iter().map(|s| s.draw(interp)).collect::<Result<Vec<_>, _>>()?;
                let mut kw = Vec::new();
                for (k, s) in kwargs {
                    kw.push((k.clone(), s.draw(interp)?));
                }
                interp.call(target, a, kw)?
            }
            Kind::Map(inner, f) => {
                let v = inner.draw(interp)?;
                interp.call(f, vec![v], Vec::new())?
            }
            Kind::Filter(inner, f) => {
                for _ in 0..FILTER_TRIES {
                    let v = inner.draw(interp)?;
                    if interp.call(f, vec![v.clone()], Vec::new())?.truthy() {
                        return Ok(v);
                    }
                }
                return Err(interp.error("UnsatisfiedAssumption", format!("filter on {} rejected every draw", inner.repr)));
            }
        })
    }
}

/// Magnitudes spread over many orders, from 1e-3 to 1e6.
fn wide_magnitude(u: f64, v: f64) -> f64 {
    10f64.powf(u * 9.0 - 3.0) * (0.5 + v)
}

impl NativeObject for Strategy {
    fn type_name(&self) -> String {
        "SearchStrategy".into()
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "map" | "filter" | "example")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, _kw: Kwargs) -> Option<Result<Value, Exc>> {
        let me = Rc::new(Strategy { kind: clone_kind(&self.kind), repr: self.repr.clone(), ctx: self.ctx.clone() });
        Some(match (name, args.as_slice()) {
            ("map", [f]) => Ok(Strategy::value(&self.ctx, Kind::Map(me, f.clone()), format!("{}.map(...)", self.repr))),
            ("filter", [f]) => Ok(Strategy::value(&self.ctx, Kind::Filter(me, f.clone()), format!("{}.filter(...)", self.repr))),
            ("example", []) => self.draw(interp),
            _ => return None,
        })
    }

    fn repr(&self) -> String {
        self.repr.clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn clone_kind(k: &Kind) -> Kind {
    match k {
        Kind::Integers(a, b) => Kind::Integers(*a, *b),
        Kind::Floats { lo, hi, nan, inf, excl_lo, excl_hi } => {
            Kind::Floats { lo: *lo, hi: *hi, nan: *nan, inf: *inf, excl_lo: *excl_lo, excl_hi: *excl_hi }
        }
        Kind::Booleans => Kind::Booleans,
        Kind::Just(v) => Kind::Just(v.clone()),
        Kind::Sampled(v) => Kind::Sampled(v.clone()),
        Kind::OneOf(v) => Kind::OneOf(v.clone()),
        Kind::Lists { elem, min, max, unique } => Kind::Lists { elem: elem.clone(), min: *min, max: *max, unique: *unique },
        Kind::Tuples(v) => Kind::Tuples(v.clone()),
        Kind::Text { alphabet, min, max } => Kind::Text { alphabet: alphabet.clone(), min: *min, max: *max },
        Kind::Dicts { keys, values, min, max } => {
            Kind::Dicts { keys: keys.clone(), values: values.clone(), min: *min, max: *max }
        }
        Kind::Fixed(v) => Kind::Fixed(v.clone()),
        Kind::Builds { target, args, kwargs } => {
            Kind::Builds { target: target.clone(), args: args.clone(), kwargs: kwargs.clone() }
        }
        Kind::Map(s, f) => Kind::Map(s.clone(), f.clone()),
        Kind::Filter(s, f) => Kind::Filter(s.clone(), f.clone()),
    }
}

/// Extracts the strategy behind a value.
pub(crate) fn as_strategy(interp: &Interpreter, v: &Value) -> Result<Rc<Strategy>, Exc> {
    match v {
        Value::Native(n) if n.as_any().is::<Strategy>() => {
            let s = v.downcast::<Strategy>().expect("checked");
            Ok(Rc::new(Strategy { kind: clone_kind(&s.kind), repr: s.repr.clone(), ctx: s.ctx.clone() }))
        }
        other => Err(interp.error(
            "InvalidArgument",
            format!("expected a SearchStrategy but got {} (type={})", other.repr(), other.type_name()),
        )),
    }
}

fn opt_int(interp: &Interpreter, v: &Option<Value>, what: &str) -> Result<Option<i64>, Exc> {
    match v {
        None | Some(Value::None) => Ok(None),
        Some(Value::Float(f)) if f.fract() == 0.0 && f.is_finite() => Ok(Some(*f as i64)),
        Some(x) => expect_int(interp, x, what).map(Some),
    }
}

fn opt_float(interp: &Interpreter, v: &Option<Value>, what: &str) -> Result<Option<f64>, Exc> {
    match v {
        None | Some(Value::None) => Ok(None),
        Some(x) => expect_float(interp, x, what).map(Some),
    }
}

fn opt_bool(v: &Option<Value>) -> Option<bool> {
    match v {
        None | Some(Value::None) => None,
        Some(x) => Some(x.truthy()),
    }
}

fn size_args(interp: &Interpreter, min: &Option<Value>, max: &Option<Value>) -> Result<(usize, Option<usize>), Exc> {
    let lo = opt_int(interp, min, "min_size")?.unwrap_or(0);
    let hi = opt_int(interp, max, "max_size")?;
    if lo < 0 || hi.is_some_and(|h| h < lo) {
        return Err(interp.error("InvalidArgument", format!("invalid size bounds min_size={lo} max_size={hi:?}")));
    }
    Ok((lo as usize, hi.map(|h| h as usize)))
}

fn strategies_of(interp: &Interpreter, args: &[Value]) -> Result<Vec<Rc<Strategy>>, Exc> {
    args.iter().map(|a| as_strategy(interp, a)).collect()
}

fn fmt_args(args: &[Value], kwargs: &Kwargs) -> String {
    args.iter()
        .map(Value::repr)
        .chain(kwargs.iter().map(|(k, v)| format!("{k}={}", v.repr())))
        .collect::<Vec<_>>()
        .join(", ")
}

type StratFn = fn(&Rc<Ctx>, &mut Interpreter, Vec<Value>, Kwargs) -> Result<Kind, Exc>;

fn integers(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "integers", &["min_value", "max_value"], args, kw)?;
    let (lo, hi) = (opt_int(i, &s[0], "min_value")?, opt_int(i, &s[1], "max_value")?);
    if let (Some(a), Some(b)) = (lo, hi) {
        if a > b {
            return Err(i.error("InvalidArgument", format!("Cannot have max_value={b} < min_value={a}")));
        }
    }
    Ok(Kind::Integers(lo, hi))
}

fn floats(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let names = ["min_value", "max_value", "allow_nan", "allow_infinity", "allow_subnormal", "width", "exclude_min", "exclude_max"];
    let s = bind(i, "floats", &names, args, kw)?;
    let (lo, hi) = (opt_float(i, &s[0], "min_value")?, opt_float(i, &s[1], "max_value")?);
    if let (Some(a), Some(b)) = (lo, hi) {
        if a > b {
            return Err(i.error("InvalidArgument", format!("Cannot have max_value={b} < min_value={a}")));
        }
    }
    let bounded = lo.is_some() || hi.is_some();
    let nan = opt_bool(&s[2]).unwrap_or(!bounded);
    if nan && bounded {
        return Err(i.error("InvalidArgument", "Cannot have allow_nan=True, with min_value or max_value"));
    }
    let inf = opt_bool(&s[3]).unwrap_or(!(lo.is_some() && hi.is_some()));
    Ok(Kind::Floats {
        lo,
        hi,
        nan,
        inf: inf && !(lo.is_some() && hi.is_some()),
        excl_lo: opt_bool(&s[6]).unwrap_or(false),
        excl_hi: opt_bool(&s[7]).unwrap_or(false),
    })
}

fn booleans(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    bind(i, "booleans", &[], args, kw)?;
    Ok(Kind::Booleans)
}

fn none(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    bind(i, "none", &[], args, kw)?;
    Ok(Kind::Just(Value::None))
}

fn just(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "just", &["value"], args, kw)?;
    Ok(Kind::Just(s[0].clone().unwrap_or(Value::None)))
}

fn sampled_from(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "sampled_from", &["elements"], args, kw)?;
    let items = i.iterate(s[0].as_ref().unwrap_or(&Value::None))?;
    if items.is_empty() {
        return Err(i.error("InvalidArgument", "Cannot sample from a length-zero sequence"));
    }
    Ok(Kind::Sampled(items))
}

fn one_of(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Kind, Exc> {
    let items = match args.as_slice() {
        [Value::List(_) | Value::Tuple(_)] => i.iterate(&args[0])?,
        _ => args,
    };
    if items.is_empty() {
        return Err(i.error("InvalidArgument", "one_of() needs at least one strategy"));
    }
    Ok(Kind::OneOf(strategies_of(i, &items)?))
}

fn lists(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "lists", &["elements", "min_size", "max_size", "unique_by", "unique"], args, kw)?;
    let elem = as_strategy(i, s[0].as_ref().unwrap_or(&Value::None))?;
    let (min, max) = size_args(i, &s[1], &s[2])?;
    Ok(Kind::Lists { elem, min, max, unique: opt_bool(&s[4]).unwrap_or(false) })
}

fn tuples(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Kind, Exc> {
    Ok(Kind::Tuples(strategies_of(i, &args)?))
}

fn text(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "text", &["alphabet", "min_size", "max_size"], args, kw)?;
    let alphabet: Vec<char> = match &s[0] {
        Some(Value::Str(a)) => a.chars().collect(),
        _ => (' '..='~').collect(),
    };
    if alphabet.is_empty() {
        return Err(i.error("InvalidArgument", "alphabet must not be empty"));
    }
    let (min, max) = size_args(i, &s[1], &s[2])?;
    Ok(Kind::Text { alphabet, min, max })
}

fn dictionaries(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "dictionaries", &["keys", "values", "min_size", "max_size"], args, kw)?;
    let keys = as_strategy(i, s[0].as_ref().unwrap_or(&Value::None))?;
    let values = as_strategy(i, s[1].as_ref().unwrap_or(&Value::None))?;
    let (min, max) = size_args(i, &s[2], &s[3])?;
    Ok(Kind::Dicts { keys, values, min, max })
}

fn fixed_dictionaries(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let s = bind(i, "fixed_dictionaries", &["mapping"], args, kw)?;
    let Some(Value::Dict(d)) = &s[0] else {
        return Err(i.error("InvalidArgument", "fixed_dictionaries() expects a dict of strategies"));
    };
    let entries = d.borrow().entries.clone();
    let mut parts = Vec::new();
    for (k, v) in entries {
        parts.push((k, as_strategy(i, &v)?));
    }
    Ok(Kind::Fixed(parts))
}

fn builds(_: &Rc<Ctx>, i: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Kind, Exc> {
    let Some((target, rest)) = args.split_first() else {
        return Err(i.error("TypeError", "builds() missing required argument: 'target'"));
    };
    let mut kwargs = Vec::new();
    for (k, v) in kw {
        kwargs.push((k, as_strategy(i, &v)?));
    }
    Ok(Kind::Builds { target: target.clone(), args: strategies_of(i, rest)?, kwargs })
}

pub(crate) fn strategies_module(ctx: &Rc<Ctx>) -> Value {
    let table: &[(&str, StratFn)] = &[
        ("integers", integers),
        ("floats", floats),
        ("booleans", booleans),
        ("none", none),
        ("just", just),
        ("sampled_from", sampled_from),
        ("one_of", one_of),
        ("lists", lists),
        ("tuples", tuples),
        ("text", text),
        ("dictionaries", dictionaries),
        ("fixed_dictionaries", fixed_dictionaries),
        ("builds", builds),
    ];
    let attrs = table.iter().map(|(name, f)| {
        let (ctx, f, name) = (ctx.clone(), *f, *name);
        let value = Builtin::value(name, move |i, args, kw| {
            let repr = format!("{name}({})", fmt_args(&args, &kw));
            let kind = f(&ctx, i, args, kw)?;
            Ok(Strategy::value(&ctx, kind, repr))
        });
        (name.to_string(), value)
    });
    ModuleObj::value("hypothesis.strategies", attrs.collect::<Vec<_>>())
}

/// Positional and keyword strategies attached to a test by `@given`.
pub(crate) struct GivenSpec {
    pub args: Vec<Rc<Strategy>>,
    pub kwargs: Vec<(String, Rc<Strategy>)>,
}

impl NativeObject for GivenSpec {
    fn type_name(&self) -> String {
        "GivenSpec".into()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[derive(Default, Clone)]
pub(crate) struct Settings {
    pub max_examples: Option<u32>,
    pub suppressed: Vec<String>,
}

impl NativeObject for Settings {
    fn type_name(&self) -> String {
        "settings".into()
    }

    fn call(&self, interp: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Value, Exc> {
        let [f] = <[Value; 1]>::try_from(args).map_err(|_| interp.error("TypeError", "settings() decorates one test"))?;
        interp.set_attr(&f, SETTINGS_ATTR, Value::native(self.clone()))?;
        Ok(f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Explicit examples from `@example(...)`.
pub(crate) struct ExampleSpec {
    pub args: Vec<Value>,
    pub kwargs: Kwargs,
}

impl NativeObject for ExampleSpec {
    fn type_name(&self) -> String {
        "example".into()
    }

    fn call(&self, interp: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Value, Exc> {
        let [f] = <[Value; 1]>::try_from(args).map_err(|_| interp.error("TypeError", "example() decorates one test"))?;
        let existing = interp.get_attr(&f, EXAMPLES_ATTR).ok();
        let mut list = match existing {
            Some(Value::List(l)) => l.borrow().clone(),
            _ => Vec::new(),
        };
        list.insert(0, Value::native(ExampleSpec { args: self.args.clone(), kwargs: self.kwargs.clone() }));
        interp.set_attr(&f, EXAMPLES_ATTR, Value::list(list))?;
        Ok(f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct GivenDecorator(Rc<GivenSpec>);

impl NativeObject for GivenDecorator {
    fn type_name(&self) -> String {
        "given".into()
    }

    fn call(&self, interp: &mut Interpreter, args: Vec<Value>, _kw: Kwargs) -> Result<Value, Exc> {
        let [f] = <[Value; 1]>::try_from(args).map_err(|_| interp.error("TypeError", "given() decorates one test"))?;
        if !matches!(f, Value::Function(_)) {
            return Err(interp.error("InvalidArgument", "@given can only decorate functions"));
        }
        let spec = GivenSpec { args: self.0.args.clone(), kwargs: self.0.kwargs.clone() };
        interp.set_attr(&f, GIVEN_ATTR, Value::native(spec))?;
        Ok(f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) fn hypothesis_module(ctx: &Rc<Ctx>, interp: &mut Interpreter) -> Value {
    let health: Vec<(String, Value)> = ["function_scoped_fixture", "too_slow", "filter_too_much", "data_too_large", "large_base_example"]
        .iter()
        .map(|n| (n.to_string(), Value::str(n)))
        .collect();
    let errors: Vec<(String, Value)> = ["UnsatisfiedAssumption", "FailedHealthCheck", "InvalidArgument", "Unsatisfiable"]
        .iter()
        .map(|n| (n.to_string(), Value::ExcClass(interp.exc_class(n))))
        .collect();
    let attrs = vec![
        (
            "given".to_string(),
            Builtin::value("given", |i, args, kw| {
                if args.is_empty() && kw.is_empty() {
                    return Err(i.error("InvalidArgument", "given must be called with at least one argument"));
                }
                let args = strategies_of(i, &args)?;
                let mut kwargs = Vec::new();
                for (k, v) in kw {
                    kwargs.push((k, as_strategy(i, &v)?));
                }
                Ok(Value::native(GivenDecorator(Rc::new(GivenSpec { args, kwargs }))))
            }),
        ),
        (
            "settings".to_string(),
            Builtin::value("settings", |i, _args, kw| {
                let mut s = Settings::default();
                for (k, v) in kw {
                    match k.as_str() {
                        "max_examples" => {
                            let n = expect_int(i, &v, "max_examples")?;
                            if n < 1 {
                                return Err(i.error("InvalidArgument", format!("max_examples={n} must be at least one")));
                            }
                            s.max_examples = Some(n as u32);
                        }
                        "suppress_health_check" => {
                            s.suppressed = i.iterate(&v)?.iter().map(Value::to_str).collect();
                        }
                        _ => {}
                    }
                }
                Ok(Value::native(s))
            }),
        ),
        (
            "example".to_string(),
            Builtin::value("example", |_, args, kwargs| Ok(Value::native(ExampleSpec { args, kwargs }))),
        ),
        (
            "assume".to_string(),
            Builtin::value("assume", |i, args, _| {
                if args.first().is_some_and(Value::truthy) {
                    Ok(Value::Bool(true))
                } else {
                    Err(i.error("UnsatisfiedAssumption", "failed to satisfy assume()"))
                }
            }),
        ),
        ("reject".to_string(), Builtin::value("reject", |i, _, _| Err(i.error("UnsatisfiedAssumption", "reject()")))),
        ("note".to_string(), Builtin::value("note", |_, _, _| Ok(Value::None))),
        ("HealthCheck".to_string(), ModuleObj::value("HealthCheck", health)),
        ("errors".to_string(), ModuleObj::value("hypothesis.errors", errors)),
        ("strategies".to_string(), strategies_module(ctx)),
    ];
    ModuleObj::value("hypothesis", attrs)
}
