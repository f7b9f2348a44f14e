//! Runtime values.

use std::any::Any;
use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use indexmap::IndexMap;

use crate::ast::{Expr, Params, Stmt};
use crate::interp::Interpreter;

pub type Scope = Rc<RefCell<IndexMap<String, Value>>>;
pub type Kwargs = Vec<(String, Value)>;
pub type NativeFn = dyn Fn(&mut Interpreter, Vec<Value>, Kwargs) -> Result<Value, Exc>;

pub fn new_scope() -> Scope {
    Rc::new(RefCell::new(IndexMap::new()))
}

#[derive(Clone)]
pub enum Value {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(Rc<str>),
    List(Rc<RefCell<Vec<Value>>>),
    Tuple(Rc<Vec<Value>>),
    Dict(Rc<RefCell<Dict>>),
    Set(Rc<RefCell<Vec<Value>>>),
    Range(i64, i64, i64),
    Function(Rc<Function>),
    Builtin(Rc<Builtin>),
    BoundMethod(Rc<(Value, String)>),
    Native(Rc<dyn NativeObject>),
    Module(Rc<ModuleObj>),
    ExcClass(Rc<ExcClass>),
    Exception(Exc),
    Ellipsis,
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.repr())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(f: f64) -> Self {
        Value::Float(f)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(Rc::from(s))
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(Rc::from(s))
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(o: Option<T>) -> Self {
        o.map_or(Value::None, Into::into)
    }
}

/// Insertion-ordered mapping with Python equality on keys.
#[derive(Clone, Default)]
pub struct Dict {
    pub entries: Vec<(Value, Value)>,
}

impl Dict {
    pub fn get(&self, key: &Value) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k.py_eq(key)).map(|(_, v)| v)
    }

    pub fn insert(&mut self, key: Value, value: Value) {
        match self.entries.iter_mut().find(|(k, _)| k.py_eq(&key)) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn remove(&mut self, key: &Value) -> Option<Value> {
        let i = self.entries.iter().position(|(k, _)| k.py_eq(key))?;
        Some(self.entries.remove(i).1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub enum FuncBody {
    Block(Rc<Vec<Stmt>>),
    Lambda(Rc<Expr>),
}

/// Lexical environment of a running function.
pub struct Env {
    pub vars: Scope,
    pub parent: Option<Rc<Env>>,
    pub globals: Scope,
    pub global_names: RefCell<Vec<String>>,
}

pub struct Function {
    pub name: String,
    pub params: Rc<Params>,
    pub defaults: Vec<Option<Value>>,
    pub kwdefaults: Vec<Option<Value>>,
    pub body: FuncBody,
    pub closure: Rc<Env>,
    pub attrs: RefCell<IndexMap<String, Value>>,
    pub line: usize,
}

pub struct Builtin {
    pub name: String,
    pub func: Box<NativeFn>,
}

impl Builtin {
    pub fn value(
        name: impl Into<String>,
        f: impl Fn(&mut Interpreter, Vec<Value>, Kwargs) -> Result<Value, Exc> + 'static,
    ) -> Value {
        Value::Builtin(Rc::new(Builtin { name: name.into(), func: Box::new(f) }))
    }
}

pub struct ModuleObj {
    pub name: String,
    pub attrs: Scope,
}

impl ModuleObj {
    pub fn value(name: impl Into<String>, attrs: impl IntoIterator<Item = (String, Value)>) -> Value {
        Value::Module(Rc::new(ModuleObj { name: name.into(), attrs: Rc::new(RefCell::new(attrs.into_iter().collect())) }))
    }
}

#[derive(Debug)]
pub struct ExcClass {
    pub name: String,
    pub base: Option<Rc<ExcClass>>,
}

impl ExcClass {
    pub fn is_subclass_of(&self, other: &ExcClass) -> bool {
        let mut cur = Some(self);
        while let Some(c) = cur {
            if std::ptr::eq(c, other) {
                return true;
            }
            cur = c.base.as_deref();
        }
        false
    }
}

pub struct ExcInner {
    pub class: Rc<ExcClass>,
    pub args: Vec<Value>,
    pub line: Cell<Option<usize>>,
}

/// A raised (or raisable) exception instance.
#[derive(Clone)]
pub struct Exc(pub Rc<ExcInner>);

impl Exc {
    pub fn new(class: Rc<ExcClass>, args: Vec<Value>) -> Self {
        Exc(Rc::new(ExcInner { class, args, line: Cell::new(None) }))
    }

    pub fn class_name(&self) -> &str {
        &self.0.class.name
    }

    pub fn is_instance(&self, class: &ExcClass) -> bool {
        self.0.class.is_subclass_of(class)
    }

    pub fn is_named(&self, name: &str) -> bool {
        let mut cur = Some(&*self.0.class);
        while let Some(c) = cur {
            if c.name == name {
                return true;
            }
            cur = c.base.as_deref();
        }
        false
    }

    pub fn message(&self) -> String {
        match self.0.args.as_slice() {
            [] => String::new(),
            [one] if self.is_named("KeyError") => one.repr(),
            [one] => one.to_str(),
            many => Value::Tuple(Rc::new(many.to_vec())).repr(),
        }
    }

    pub fn line(&self) -> Option<usize> {
        self.0.line.get()
    }
}

impl fmt::Display for Exc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message();
        if msg.is_empty() {
            f.write_str(self.class_name())
        } else {
            write!(f, "{}: {}", self.class_name(), msg)
        }
    }
}

impl fmt::Debug for Exc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Host object exposed to interpreted code.
///
/// Methods return `None` when the name is not handled, which the interpreter
/// turns into an `AttributeError`.
pub trait NativeObject: Any {
    fn type_name(&self) -> String;

    fn get_attr(&self, _interp: &mut Interpreter, _name: &str) -> Option<Result<Value, Exc>> {
        None
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, _value: Value) -> Result<(), Exc> {
        Err(interp.error(
            "AttributeError",
            format!("'{}' object attribute '{name}' is read-only", self.type_name()),
        ))
    }

    fn has_method(&self, _name: &str) -> bool {
        false
    }

    fn call_method(
        &self,
        _interp: &mut Interpreter,
        _name: &str,
        _args: Vec<Value>,
        _kwargs: Kwargs,
    ) -> Option<Result<Value, Exc>> {
        None
    }

    fn call(&self, interp: &mut Interpreter, _args: Vec<Value>, _kwargs: Kwargs) -> Result<Value, Exc> {
        Err(interp.error("TypeError", format!("'{}' object is not callable", self.type_name())))
    }

    fn enter(&self, interp: &mut Interpreter) -> Result<Value, Exc> {
        Err(interp.error(
            "TypeError",
            format!("'{}' object does not support the context manager protocol", self.type_name()),
        ))
    }

    /// Returns true to suppress `exc`.
    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        Ok(false)
    }

    fn iterate(&self, _interp: &mut Interpreter) -> Option<Result<Vec<Value>, Exc>> {
        None
    }

    fn truthy(&self) -> bool {
        true
    }

    fn repr(&self) -> String {
        format!("<{} object>", self.type_name())
    }

    fn as_any(&self) -> &dyn Any;
}

impl Value {
    pub fn str(s: impl AsRef<str>) -> Value {
        Value::Str(Rc::from(s.as_ref()))
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Rc::new(RefCell::new(items)))
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(Rc::new(items))
    }

    pub fn dict(entries: impl IntoIterator<Item = (Value, Value)>) -> Value {
        let mut d = Dict::default();
        for (k, v) in entries {
            d.insert(k, v);
        }
        Value::Dict(Rc::new(RefCell::new(d)))
    }

    pub fn native(obj: impl NativeObject) -> Value {
        Value::Native(Rc::new(obj))
    }

    pub fn type_name(&self) -> String {
        match self {
            Value::None => "NoneType".into(),
            Value::Bool(_) => "bool".into(),
            Value::Int(_) => "int".into(),
            Value::Float(_) => "float".into(),
            Value::Str(_) => "str".into(),
            Value::List(_) => "list".into(),
            Value::Tuple(_) => "tuple".into(),
            Value::Dict(_) => "dict".into(),
            Value::Set(_) => "set".into(),
            Value::Range(..) => "range".into(),
            Value::Function(_) => "function".into(),
            Value::Builtin(_) | Value::BoundMethod(_) => "builtin_function_or_method".into(),
            Value::Native(n) => n.type_name(),
            Value::Module(_) => "module".into(),
            Value::ExcClass(_) => "type".into(),
            Value::Exception(e) => e.class_name().to_string(),
            Value::Ellipsis => "ellipsis".into(),
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::None => false,
            Value::Bool(b) => *b,
            Value::Int(i) => *i != 0,
            Value::Float(f) => *f != 0.0,
            Value::Str(s) => !s.is_empty(),
            Value::List(l) | Value::Set(l) => !l.borrow().is_empty(),
            Value::Tuple(t) => !t.is_empty(),
            Value::Dict(d) => !d.borrow().is_empty(),
            Value::Range(a, b, s) => range_len(*a, *b, *s) > 0,
            Value::Native(n) => n.truthy(),
            _ => true,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Bool(b) => Some(*b as i64 as f64),
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Bool(b) => Some(*b as i64),
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Value::None)
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Value::Bool(_) | Value::Int(_) | Value::Float(_))
    }

    pub fn downcast<T: 'static>(&self) -> Option<&T> {
        match self {
            Value::Native(n) => n.as_any().downcast_ref::<T>(),
            _ => None,
        }
    }

    /// Identity for reference types, value equality for immutable scalars.
    pub fn is(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::None, Value::None) | (Value::Ellipsis, Value::Ellipsis) => true,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::List(a), Value::List(b)) | (Value::Set(a), Value::Set(b)) => Rc::ptr_eq(a, b),
            (Value::Tuple(a), Value::Tuple(b)) => Rc::ptr_eq(a, b),
            (Value::Dict(a), Value::Dict(b)) => Rc::ptr_eq(a, b),
            (Value::Function(a), Value::Function(b)) => Rc::ptr_eq(a, b),
            (Value::Builtin(a), Value::Builtin(b)) => Rc::ptr_eq(a, b),
            (Value::Native(a), Value::Native(b)) => Rc::ptr_eq(a, b),
            (Value::Module(a), Value::Module(b)) => Rc::ptr_eq(a, b),
            (Value::ExcClass(a), Value::ExcClass(b)) => Rc::ptr_eq(a, b),
            (Value::Exception(a), Value::Exception(b)) => Rc::ptr_eq(&a.0, &b.0),
            _ => false,
        }
    }

    pub fn py_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (a, b) if a.is_number() && b.is_number() => match (a.as_int(), b.as_int()) {
                (Some(x), Some(y)) => x == y,
                _ => a.as_f64() == b.as_f64(),
            },
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::List(a), Value::List(b)) => seq_eq(&a.borrow(), &b.borrow()),
            (Value::Tuple(a), Value::Tuple(b)) => seq_eq(a, b),
            (Value::Set(a), Value::Set(b)) => {
                let (a, b) = (a.borrow(), b.borrow());
                a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| x.py_eq(y)))
            }
            (Value::Dict(a), Value::Dict(b)) => {
                let (a, b) = (a.borrow(), b.borrow());
                a.len() == b.len() && a.entries.iter().all(|(k, v)| b.get(k).is_some_and(|w| v.py_eq(w)))
            }
            (Value::Range(a1, b1, s1), Value::Range(a2, b2, s2)) => (a1, b1, s1) == (a2, b2, s2),
            (Value::BoundMethod(a), Value::BoundMethod(b)) => a.0.is(&b.0) && a.1 == b.1,
            _ => self.is(other),
        }
    }

    /// Ordering for `<`-style comparisons; `None` when the types are unordered.
    pub fn py_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (a, b) if a.is_number() && b.is_number() => match (a.as_int(), b.as_int()) {
                (Some(x), Some(y)) => Some(x.cmp(&y)),
                _ => a.as_f64()?.partial_cmp(&b.as_f64()?),
            },
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::List(a), Value::List(b)) => seq_cmp(&a.borrow(), &b.borrow()),
            (Value::Tuple(a), Value::Tuple(b)) => seq_cmp(a, b),
            _ => None,
        }
    }

    /// `str(x)`.
    pub fn to_str(&self) -> String {
        match self {
            Value::Str(s) => s.to_string(),
            Value::Exception(e) => e.message(),
            _ => self.repr(),
        }
    }

    /// `repr(x)`.
    pub fn repr(&self) -> String {
        match self {
            Value::None => "None".into(),
            Value::Bool(true) => "True".into(),
            Value::Bool(false) => "False".into(),
            Value::Int(i) => i.to_string(),
            Value::Float(f) => float_repr(*f),
            Value::Str(s) => str_repr(s),
            Value::List(l) => format!("[{}]", join_repr(&l.borrow())),
            Value::Tuple(t) if t.len() == 1 => format!("({},)", t[0].repr()),
            Value::Tuple(t) => format!("({})", join_repr(t)),
            Value::Set(s) if s.borrow().is_empty() => "set()".into(),
            Value::Set(s) => format!("{{{}}}", join_repr(&s.borrow())),
            Value::Dict(d) => {
                let d = d.borrow();
                let body: Vec<String> = d.entries.iter().map(|(k, v)| format!("{}: {}", k.repr(), v.repr())).collect();
                format!("{{{}}}", body.join(", "))
            }
            Value::Range(a, b, 1) => format!("range({a}, {b})"),
            Value::Range(a, b, s) => format!("range({a}, {b}, {s})"),
            Value::Function(f) => format!("<function {}>", f.name),
            Value::Builtin(b) => format!("<built-in function {}>", b.name),
            Value::BoundMethod(m) => format!("<bound method {} of {}>", m.1, m.0.type_name()),
            Value::Native(n) => n.repr(),
            Value::Module(m) => format!("<module '{}'>", m.name),
            Value::ExcClass(c) => format!("<class '{}'>", c.name),
            Value::Exception(e) => {
                format!("{}({})", e.class_name(), join_repr(&e.0.args))
            }
            Value::Ellipsis => "Ellipsis".into(),
        }
    }
}

fn seq_eq(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.py_eq(y))
}

fn seq_cmp(a: &[Value], b: &[Value]) -> Option<Ordering> {
    for (x, y) in a.iter().zip(b) {
        if !x.py_eq(y) {
            return x.py_cmp(y);
        }
    }
    Some(a.len().cmp(&b.len()))
}

fn join_repr(items: &[Value]) -> String {
    items.iter().map(Value::repr).collect::<Vec<_>>().join(", ")
}

pub fn range_len(start: i64, stop: i64, step: i64) -> i64 {
    if step > 0 && start < stop {
        (stop - start + step - 1) / step
    } else if step < 0 && start > stop {
        (start - stop - step - 1) / (-step)
    } else {
        0
    }
}

pub fn str_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') { '"' } else { '\'' };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(quote);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c if (c as u32) < 0x20 => out.push_str(&format!("\\x{:02x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

/// Shortest round-trip float formatting in Python's style.
pub fn float_repr(f: f64) -> String {
    if f.is_nan() {
        return "nan".into();
    }
    if f.is_infinite() {
        return if f > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if f == 0.0 {
        return if f.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{f:e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if neg { "-" } else { "" };
    if (-4..16).contains(&exp) {
        let n = digits.len() as i32;
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else if exp + 1 >= n {
            format!("{}{}.0", digits, "0".repeat((exp + 1 - n) as usize))
        } else {
            let (a, b) = digits.split_at((exp + 1) as usize);
            format!("{a}.{b}")
        };
        format!("{sign}{body}")
    } else {
        let m = if digits.len() > 1 { format!("{}.{}", &digits[..1], &digits[1..]) } else { digits };
        let es = if exp < 0 { "-" } else { "+" };
        format!("{sign}{m}e{es}{:02}", exp.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_repr_matches_python() {
        let cases = [
            (0.1, "0.1"),
            (1.0, "1.0"),
            (-2.5, "-2.5"),
            (1e16, "1e+16"),
            (1.5e-7, "1.5e-07"),
            (0.0001, "0.0001"),
            (123456789.0, "123456789.0"),
            (1e15, "1000000000000000.0"),
            (f64::INFINITY, "inf"),
            (0.30000000000000004, "0.30000000000000004"),
        ];
        for (f, want) in cases {
            assert_eq!(float_repr(f), want, "{f}");
        }
    }

    #[test]
    fn str_repr_quotes() {
        assert_eq!(str_repr("a'b"), "\"a'b\"");
        assert_eq!(str_repr("a\nb"), "'a\\nb'");
    }

    #[test]
    fn numeric_equality_crosses_types() {
        assert!(Value::Int(1).py_eq(&Value::Float(1.0)));
        assert!(Value::Bool(true).py_eq(&Value::Int(1)));
        assert!(!Value::Float(f64::NAN).py_eq(&Value::Float(f64::NAN)));
    }

    #[test]
    fn range_lengths() {
        assert_eq!(range_len(0, 10, 3), 4);
        assert_eq!(range_len(10, 0, -3), 4);
        assert_eq!(range_len(5, 5, 1), 0);
    }
}
