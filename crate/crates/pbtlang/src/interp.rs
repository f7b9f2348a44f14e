//! Tree-walking evaluator.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use indexmap::IndexMap;

use crate::ast::*;
use crate::builtins;
use crate::value::*;

type ModuleFactory = Rc<dyn Fn(&mut Interpreter) -> Result<Value, Exc>>;

enum Ctl {
    Normal,
    Break,
    Continue,
    Return(Value),
}

pub const DEFAULT_RECURSION_LIMIT: usize = 200;

pub struct Interpreter {
    builtins: IndexMap<String, Value>,
    exc_classes: HashMap<String, Rc<ExcClass>>,
    factories: HashMap<String, ModuleFactory>,
    loaded: HashMap<String, Value>,
    handling: Vec<Exc>,
    depth: usize,
    pub recursion_limit: usize,
    line: usize,
    /// Text written by `print`.
    pub stdout: String,
}

impl Default for Interpreter {
    fn default() -> Self {
        Self::new()
    }
}

const BUILTIN_EXCEPTIONS: &[(&str, Option<&str>)] = &[
    ("BaseException", None),
    ("Exception", Some("BaseException")),
    ("ArithmeticError", Some("Exception")),
    ("ZeroDivisionError", Some("ArithmeticError")),
    ("OverflowError", Some("ArithmeticError")),
    ("AssertionError", Some("Exception")),
    ("AttributeError", Some("Exception")),
    ("ImportError", Some("Exception")),
    ("ModuleNotFoundError", Some("ImportError")),
    ("LookupError", Some("Exception")),
    ("IndexError", Some("LookupError")),
    ("KeyError", Some("LookupError")),
    ("NameError", Some("Exception")),
    ("UnboundLocalError", Some("NameError")),
    ("RuntimeError", Some("Exception")),
    ("NotImplementedError", Some("RuntimeError")),
    ("RecursionError", Some("RuntimeError")),
    ("TypeError", Some("Exception")),
    ("ValueError", Some("Exception")),
    ("StopIteration", Some("Exception")),
    ("OSError", Some("Exception")),
    ("TimeoutError", Some("OSError")),
    ("MemoryError", Some("Exception")),
    ("SyntaxError", Some("Exception")),
];

impl Interpreter {
    pub fn new() -> Self {
        let mut interp = Interpreter {
            builtins: IndexMap::new(),
            exc_classes: HashMap::new(),
            factories: HashMap::new(),
            loaded: HashMap::new(),
            handling: Vec::new(),
            depth: 0,
            recursion_limit: DEFAULT_RECURSION_LIMIT,
            line: 0,
            stdout: String::new(),
        };
        for (name, base) in BUILTIN_EXCEPTIONS {
            let class = interp.define_exception(name, *base);
            interp.builtins.insert(name.to_string(), Value::ExcClass(class));
        }
        builtins::install(&mut interp);
        crate::stdlib::install(&mut interp);
        interp
    }

    // ------------------------------------------------------------ host API

    pub fn set_builtin(&mut self, name: &str, value: Value) {
        self.builtins.insert(name.to_string(), value);
    }

    pub fn define_exception(&mut self, name: &str, base: Option<&str>) -> Rc<ExcClass> {
        let base = base.map(|b| self.exc_class(b));
        let class = Rc::new(ExcClass { name: name.to_string(), base });
        self.exc_classes.insert(name.to_string(), class.clone());
        class
    }

    /// Looks up a class registered through [`Interpreter::define_exception`].
    pub fn exc_class(&self, name: &str) -> Rc<ExcClass> {
        self.exc_classes
            .get(name)
            .cloned()
            .unwrap_or_else(|| panic!("exception class {name} is not defined"))
    }

    pub fn error(&self, class: &str, msg: impl Into<String>) -> Exc {
        let exc = Exc::new(self.exc_class(class), vec![Value::str(msg.into())]);
        exc.0.line.set(Some(self.line));
        exc
    }

    pub fn register_module(
        &mut self,
        name: &str,
        factory: impl Fn(&mut Interpreter) -> Result<Value, Exc> + 'static,
    ) {
        self.loaded.remove(name);
        self.factories.insert(name.to_string(), Rc::new(factory));
    }

    /// Runs a parsed module and returns its globals.
    pub fn run_module(&mut self, module: &Module) -> Result<Scope, Exc> {
        let globals = new_scope();
        globals.borrow_mut().insert("__name__".into(), Value::str("__main__"));
        let env = Rc::new(Env { vars: globals.clone(), parent: None, globals: globals.clone(), global_names: RefCell::default() });
        match self.exec_block(&module.body, &env)? {
            Ctl::Normal => Ok(globals),
            _ => Err(self.error("SyntaxError", "'return' or loop control outside function")),
        }
    }

    pub fn current_line(&self) -> usize {
        self.line
    }

    // ------------------------------------------------------------ statements

    fn exec_block(&mut self, body: &[Stmt], env: &Rc<Env>) -> Result<Ctl, Exc> {
        for stmt in body {
            match self.exec(stmt, env) {
                Ok(Ctl::Normal) => {}
                Ok(other) => return Ok(other),
                Err(e) => {
                    if e.0.line.get().is_none() {
                        e.0.line.set(Some(stmt.line));
                    }
                    return Err(e);
                }
            }
        }
        Ok(Ctl::Normal)
    }

    fn exec(&mut self, stmt: &Stmt, env: &Rc<Env>) -> Result<Ctl, Exc> {
        self.line = stmt.line;
        match &stmt.kind {
            StmtKind::Expr(e) => {
                self.eval(e, env)?;
            }
            StmtKind::Assign(targets, value) => {
                let v = self.eval(value, env)?;
                for t in targets {
                    self.assign(t, v.clone(), env)?;
                }
            }
            StmtKind::AugAssign(target, op, value) => self.aug_assign(target, *op, value, env)?,
            StmtKind::AnnAssign(target, value) => {
                if let Some(value) = value {
                    let v = self.eval(value, env)?;
                    self.assign(target, v, env)?;
                }
            }
            StmtKind::If(test, body, orelse) => {
                let branch = if self.eval(test, env)?.truthy() { body } else { orelse };
                return self.exec_block(branch, env);
            }
            StmtKind::While(test, body, orelse) => {
                loop {
                    if !self.eval(test, env)?.truthy() {
                        return self.exec_block(orelse, env);
                    }
                    match self.exec_block(body, env)? {
                        Ctl::Break => break,
                        Ctl::Return(v) => return Ok(Ctl::Return(v)),
                        Ctl::Normal | Ctl::Continue => {}
                    }
                }
            }
            StmtKind::For(target, iter, body, orelse) => {
                let it = self.eval(iter, env)?;
                let items: Box<dyn Iterator<Item = Value>> = match it {
                    Value::Range(start, stop, step) => {
                        let n = range_len(start, stop, step);
                        Box::new((0..n).map(move |i| Value::Int(start + i * step)))
                    }
                    other => Box::new(self.iterate(&other)?.into_iter()),
                };
                for item in items {
                    self.assign(target, item, env)?;
                    match self.exec_block(body, env)? {
                        Ctl::Break => return Ok(Ctl::Normal),
                        Ctl::Return(v) => return Ok(Ctl::Return(v)),
                        Ctl::Normal | Ctl::Continue => {}
                    }
                }
                return self.exec_block(orelse, env);
            }
            StmtKind::Break => return Ok(Ctl::Break),
            StmtKind::Continue => return Ok(Ctl::Continue),
            StmtKind::Pass => {}
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e, env)?,
                    None => Value::None,
                };
                return Ok(Ctl::Return(v));
            }
            StmtKind::Assert(test, msg) => self.exec_assert(test, msg.as_ref(), env)?,
            StmtKind::FunctionDef(def) => {
                let f = self.define_function(def, env)?;
                self.store_name(&def.name, f, env);
            }
            StmtKind::Import(aliases) => {
                for alias in aliases {
                    let module = self.import_dotted(&alias.name)?;
                    match &alias.asname {
                        Some(asname) => self.store_name(asname, module, env),
                        None => {
                            let top = alias.name.split('.').next().unwrap_or_default();
                            let top_module = self.import_module(top)?;
                            self.store_name(top, top_module, env);
                        }
                    }
                }
            }
            StmtKind::ImportFrom(module, aliases) => self.import_from(module, aliases, env)?,
            StmtKind::With(items, body) => return self.exec_with(items, body, env),
            StmtKind::Raise(value) => {
                let exc = match value {
                    None => match self.handling.last() {
                        Some(e) => e.clone(),
                        None => self.error("RuntimeError", "No active exception to reraise"),
                    },
                    Some(e) => {
                        let v = self.eval(e, env)?;
                        self.to_exception(v)?
                    }
                };
                return Err(exc);
            }
            StmtKind::Try(body, handlers, orelse, finally) => {
                let outcome = self.exec_try(body, handlers, orelse, env);
                if finally.is_empty() {
                    return outcome;
                }
                match self.exec_block(finally, env)? {
                    Ctl::Normal => return outcome,
                    other => return Ok(other),
                }
            }
            StmtKind::Global(names) => {
                env.global_names.borrow_mut().extend(names.iter().cloned());
            }
            StmtKind::Del(targets) => {
                for t in targets {
                    self.delete(t, env)?;
                }
            }
        }
        Ok(Ctl::Normal)
    }

    fn exec_try(
        &mut self,
        body: &[Stmt],
        handlers: &[ExceptHandler],
        orelse: &[Stmt],
        env: &Rc<Env>,
    ) -> Result<Ctl, Exc> {
        let exc = match self.exec_block(body, env) {
            Ok(Ctl::Normal) => return self.exec_block(orelse, env),
            Ok(other) => return Ok(other),
            Err(exc) => exc,
        };
        for h in handlers {
            let matched = match &h.kind {
                None => true,
                Some(kind) => {
                    let k = self.eval(kind, env)?;
                    self.exception_matches(&exc, &k)?
                }
            };
            if matched {
                if let Some(name) = &h.name {
                    self.store_name(name, Value::Exception(exc.clone()), env);
                }
                self.handling.push(exc.clone());
                let r = self.exec_block(&h.body, env);
                self.handling.pop();
                return r;
            }
        }
        Err(exc)
    }

    pub fn exception_matches(&self, exc: &Exc, kind: &Value) -> Result<bool, Exc> {
        match kind {
            Value::ExcClass(c) => Ok(exc.is_instance(c)),
            Value::Tuple(items) => {
                for k in items.iter() {
                    if self.exception_matches(exc, k)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(self.error("TypeError", "catching classes that do not inherit from BaseException is not allowed")),
        }
    }

    fn exec_with(&mut self, items: &[(Expr, Option<Target>)], body: &[Stmt], env: &Rc<Env>) -> Result<Ctl, Exc> {
        let Some(((ctx, target), rest)) = items.split_first() else {
            return self.exec_block(body, env);
        };
        let manager = self.eval(ctx, env)?;
        let Value::Native(obj) = &manager else {
            return Err(self.error(
                "TypeError",
                format!("'{}' object does not support the context manager protocol", manager.type_name()),
            ));
        };
        let entered = obj.enter(self)?;
        if let Some(t) = target {
            self.assign(t, entered, env)?;
        }
        match self.exec_with(rest, body, env) {
            Ok(ctl) => {
                obj.exit(self, None)?;
                Ok(ctl)
            }
            Err(exc) => {
                if obj.exit(self, Some(&exc))? {
                    Ok(Ctl::Normal)
                } else {
                    Err(exc)
                }
            }
        }
    }

    fn exec_assert(&mut self, test: &Expr, msg: Option<&Expr>, env: &Rc<Env>) -> Result<(), Exc> {
        let (ok, explanation) = match &test.kind {
            ExprKind::Compare(left, rest) => {
                let mut shown = Vec::new();
                let mut cur = self.eval(left, env)?;
                shown.push(cur.repr());
                let mut ok = true;
                for (op, e) in rest {
                    let next = self.eval(e, env)?;
                    shown.push(op.symbol().to_string());
                    shown.push(next.repr());
                    if !self.compare(*op, &cur, &next)? {
                        ok = false;
                        break;
                    }
                    cur = next;
                }
                (ok, format!("assert {}", shown.join(" ")))
            }
            ExprKind::Unary(UnaryOp::Not, inner) => {
                let v = self.eval(inner, env)?;
                (!v.truthy(), format!("assert not {}", v.repr()))
            }
            _ => {
                let v = self.eval(test, env)?;
                (v.truthy(), format!("assert {}", v.repr()))
            }
        };
        if ok {
            return Ok(());
        }
        let message = match msg {
            Some(m) => format!("{}\n{explanation}", self.eval(m, env)?.to_str()),
            None => explanation,
        };
        Err(self.error("AssertionError", message))
    }

    fn define_function(&mut self, def: &FunctionDef, env: &Rc<Env>) -> Result<Value, Exc> {
        let mut decorators = Vec::with_capacity(def.decorators.len());
        for d in &def.decorators {
            decorators.push(self.eval(d, env)?);
        }
        let (defaults, kwdefaults) = self.eval_defaults(&def.params, env)?;
        let mut f = Value::Function(Rc::new(Function {
            name: def.name.clone(),
            params: def.params.clone(),
            defaults,
            kwdefaults,
            body: FuncBody::Block(def.body.clone()),
            closure: env.clone(),
            attrs: RefCell::default(),
            line: def.line,
        }));
        for d in decorators.into_iter().rev() {
            f = self.call(&d, vec![f], Vec::new())?;
        }
        Ok(f)
    }

    #[allow(clippy::type_complexity)]
    fn eval_defaults(&mut self, params: &Params, env: &Rc<Env>) -> Result<(Vec<Option<Value>>, Vec<Option<Value>>), Exc> {
        let mut defaults = Vec::new();
        for p in &params.positional {
            defaults.push(match &p.default {
                Some(e) => Some(self.eval(e, env)?),
                None => None,
            });
        }
        let mut kwdefaults = Vec::new();
        for p in &params.kwonly {
            kwdefaults.push(match &p.default {
                Some(e) => Some(self.eval(e, env)?),
                None => None,
            });
        }
        Ok((defaults, kwdefaults))
    }

    fn aug_assign(&mut self, target: &Target, op: BinOp, value: &Expr, env: &Rc<Env>) -> Result<(), Exc> {
        match target {
            Target::Name(name) => {
                let cur = self.load_name(name, env)?;
                let rhs = self.eval(value, env)?;
                let new = self.inplace(op, cur, rhs)?;
                self.store_name(name, new, env);
            }
            Target::Attribute(obj, attr) => {
                let o = self.eval(obj, env)?;
                let cur = self.get_attr(&o, attr)?;
                let rhs = self.eval(value, env)?;
                let new = self.inplace(op, cur, rhs)?;
                self.set_attr(&o, attr, new)?;
            }
            Target::Subscript(obj, idx) => {
                let o = self.eval(obj, env)?;
                let i = self.eval(idx, env)?;
                let cur = self.get_item(&o, &i)?;
                let rhs = self.eval(value, env)?;
                let new = self.inplace(op, cur, rhs)?;
                self.set_item(&o, i, new)?;
            }
            Target::Tuple(_) => return Err(self.error("SyntaxError", "illegal expression for augmented assignment")),
        }
        Ok(())
    }

    fn inplace(&mut self, op: BinOp, cur: Value, rhs: Value) -> Result<Value, Exc> {
        if let (BinOp::Add, Value::List(l)) = (op, &cur) {
            let extra = self.iterate(&rhs)?;
            l.borrow_mut().extend(extra);
            return Ok(cur);
        }
        self.binop(op, &cur, &rhs)
    }

    pub fn store_name(&self, name: &str, value: Value, env: &Rc<Env>) {
        if env.global_names.borrow().iter().any(|n| n == name) {
            env.globals.borrow_mut().insert(name.to_string(), value);
        } else {
            env.vars.borrow_mut().insert(name.to_string(), value);
        }
    }

    fn load_name(&self, name: &str, env: &Rc<Env>) -> Result<Value, Exc> {
        if !env.global_names.borrow().iter().any(|n| n == name) {
            let mut cur = Some(env);
            while let Some(e) = cur {
                if let Some(v) = e.vars.borrow().get(name) {
                    return Ok(v.clone());
                }
                cur = e.parent.as_ref();
            }
        }
        if let Some(v) = env.globals.borrow().get(name) {
            return Ok(v.clone());
        }
        self.builtins
            .get(name)
            .cloned()
            .ok_or_else(|| self.error("NameError", format!("name '{name}' is not defined")))
    }

    fn assign(&mut self, target: &Target, value: Value, env: &Rc<Env>) -> Result<(), Exc> {
        match target {
            Target::Name(n) => {
                self.store_name(n, value, env);
                Ok(())
            }
            Target::Attribute(obj, attr) => {
                let o = self.eval(obj, env)?;
                self.set_attr(&o, attr, value)
            }
            Target::Subscript(obj, idx) => {
                let o = self.eval(obj, env)?;
                let i = self.eval(idx, env)?;
                self.set_item(&o, i, value)
            }
            Target::Tuple(targets) => {
                let items = self.iterate(&value)?;
                if items.len() > targets.len() {
                    return Err(self.error(
                        "ValueError",
                        format!("too many values to unpack (expected {})", targets.len()),
                    ));
                }
                if items.len() < targets.len() {
                    return Err(self.error(
                        "ValueError",
                        format!("not enough values to unpack (expected {}, got {})", targets.len(), items.len()),
                    ));
                }
                for (t, v) in targets.iter().zip(items) {
                    self.assign(t, v, env)?;
                }
                Ok(())
            }
        }
    }

    fn delete(&mut self, target: &Target, env: &Rc<Env>) -> Result<(), Exc> {
        match target {
            Target::Name(n) => {
                if env.vars.borrow_mut().shift_remove(n).is_none() {
                    return Err(self.error("NameError", format!("name '{n}' is not defined")));
                }
                Ok(())
            }
            Target::Subscript(obj, idx) => {
                let o = self.eval(obj, env)?;
                let i = self.eval(idx, env)?;
                match &o {
                    Value::List(l) => {
                        let n = l.borrow().len();
                        let at = self.index(&i, n, "list")?;
                        l.borrow_mut().remove(at);
                        Ok(())
                    }
                    Value::Dict(d) => {
                        let removed = d.borrow_mut().remove(&i);
                        removed.map(|_| ()).ok_or_else(|| self.key_error(&i))
                    }
                    _ => Err(self.error(
                        "TypeError",
                        format!("'{}' object does not support item deletion", o.type_name()),
                    )),
                }
            }
            Target::Attribute(..) => Err(self.error("AttributeError", "attribute deletion is not supported")),
            Target::Tuple(ts) => {
                for t in ts {
                    self.delete(t, env)?;
                }
                Ok(())
            }
        }
    }

    // ------------------------------------------------------------ imports

    fn is_package_prefix(&self, name: &str) -> bool {
        let prefix = format!("{name}.");
        self.factories.keys().any(|k| k.starts_with(&prefix))
    }

    pub fn import_module(&mut self, name: &str) -> Result<Value, Exc> {
        if let Some(m) = self.loaded.get(name) {
            return Ok(m.clone());
        }
        let module = if let Some(factory) = self.factories.get(name).cloned() {
            factory(self)?
        } else if self.is_package_prefix(name) {
            ModuleObj::value(name, Vec::new())
        } else {
            return Err(self.error("ModuleNotFoundError", format!("No module named '{name}'")));
        };
        self.loaded.insert(name.to_string(), module.clone());
        Ok(module)
    }

    /// Imports `a.b.c`, linking each package to its child, and returns the leaf.
    fn import_dotted(&mut self, name: &str) -> Result<Value, Exc> {
        let leaf = self.import_module(name)?;
        let parts: Vec<&str> = name.split('.').collect();
        for i in 1..parts.len() {
            let parent = self.import_module(&parts[..i].join("."))?;
            let child = self.import_module(&parts[..=i].join("."))?;
            if let Value::Module(p) = &parent {
                p.attrs.borrow_mut().entry(parts[i].to_string()).or_insert(child);
            }
        }
        Ok(leaf)
    }

    fn import_from(&mut self, module: &str, aliases: &[Alias], env: &Rc<Env>) -> Result<(), Exc> {
        if module.starts_with('.') {
            return Err(self.error("ImportError", "attempted relative import with no known parent package"));
        }
        let m = self.import_dotted(module)?;
        let Value::Module(mobj) = &m else { unreachable!("modules are Module values") };
        for alias in aliases {
            if alias.name == "*" {
                let attrs: Vec<(String, Value)> = mobj
                    .attrs
                    .borrow()
                    .iter()
                    .filter(|(k, _)| !k.starts_with('_'))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                for (k, v) in attrs {
                    self.store_name(&k, v, env);
                }
                continue;
            }
            let existing = mobj.attrs.borrow().get(&alias.name).cloned();
            let value = match existing {
                Some(v) => v,
                None => {
                    let sub = format!("{module}.{}", alias.name);
                    if self.factories.contains_key(&sub) || self.is_package_prefix(&sub) {
                        self.import_dotted(&sub)?
                    } else {
                        return Err(self.error(
                            "ImportError",
                            format!("cannot import name '{}' from '{module}'", alias.name),
                        ));
                    }
                }
            };
            self.store_name(alias.asname.as_deref().unwrap_or(&alias.name), value, env);
        }
        Ok(())
    }

    // ------------------------------------------------------------ expressions

    pub fn eval(&mut self, expr: &Expr, env: &Rc<Env>) -> Result<Value, Exc> {
        match &expr.kind {
            ExprKind::Const(c) => Ok(match c {
                Constant::None => Value::None,
                Constant::Bool(b) => Value::Bool(*b),
                Constant::Int(i) => Value::Int(*i),
                Constant::Float(f) => Value::Float(*f),
                Constant::Str(s) => Value::str(s),
                Constant::Ellipsis => Value::Ellipsis,
            }),
            ExprKind::Name(n) => self.load_name(n, env),
            ExprKind::Attribute(obj, attr) => {
                let o = self.eval(obj, env)?;
                self.get_attr(&o, attr)
            }
            ExprKind::Subscript(obj, idx) => {
                let o = self.eval(obj, env)?;
                if let ExprKind::Slice(lo, hi, step) = &idx.kind {
                    let bound = |e: &Option<Box<Expr>>, this: &mut Self| -> Result<Option<i64>, Exc> {
                        match e {
                            None => Ok(None),
                            Some(e) => match this.eval(e, env)? {
                                Value::None => Ok(None),
                                v => v.as_int().map(Some).ok_or_else(|| {
                                    this.error("TypeError", "slice indices must be integers or None")
                                }),
                            },
                        }
                    };
                    let lo = bound(lo, self)?;
                    let hi = bound(hi, self)?;
                    let step = bound(step, self)?;
                    return self.slice(&o, lo, hi, step);
                }
                let i = self.eval(idx, env)?;
                self.get_item(&o, &i)
            }
            ExprKind::Slice(..) => Err(self.error("SyntaxError", "slice outside subscript")),
            ExprKind::Call(callee, args) => {
                if let ExprKind::Attribute(obj, name) = &callee.kind {
                    let recv = self.eval(obj, env)?;
                    let (a, k) = self.eval_args(args, env)?;
                    return self.call_method(&recv, name, a, k);
                }
                let f = self.eval(callee, env)?;
                let (a, k) = self.eval_args(args, env)?;
                self.call(&f, a, k)
            }
            ExprKind::Bin(op, l, r) => {
                let a = self.eval(l, env)?;
                let b = self.eval(r, env)?;
                self.binop(*op, &a, &b)
            }
            ExprKind::Unary(op, inner) => {
                let v = self.eval(inner, env)?;
                self.unary(*op, &v)
            }
            ExprKind::Bool(op, items) => {
                let mut last = Value::None;
                for item in items {
                    last = self.eval(item, env)?;
                    let t = last.truthy();
                    if (*op == BoolOp::And && !t) || (*op == BoolOp::Or && t) {
                        return Ok(last);
                    }
                }
                Ok(last)
            }
            ExprKind::Compare(left, rest) => {
                let mut cur = self.eval(left, env)?;
                for (op, e) in rest {
                    let next = self.eval(e, env)?;
                    if !self.compare(*op, &cur, &next)? {
                        return Ok(Value::Bool(false));
                    }
                    cur = next;
                }
                Ok(Value::Bool(true))
            }
            ExprKind::IfExp { test, body, orelse } => {
                if self.eval(test, env)?.truthy() {
                    self.eval(body, env)
                } else {
                    self.eval(orelse, env)
                }
            }
            ExprKind::List(items) => Ok(Value::list(self.eval_items(items, env)?)),
            ExprKind::Tuple(items) => Ok(Value::tuple(self.eval_items(items, env)?)),
            ExprKind::Set(items) => {
                let mut out: Vec<Value> = Vec::new();
                for v in self.eval_items(items, env)? {
                    if !out.iter().any(|x| x.py_eq(&v)) {
                        out.push(v);
                    }
                }
                Ok(Value::Set(Rc::new(RefCell::new(out))))
            }
            ExprKind::Dict(items) => {
                let mut d = Dict::default();
                for (k, v) in items {
                    let k = self.eval(k, env)?;
                    let v = self.eval(v, env)?;
                    d.insert(k, v);
                }
                Ok(Value::Dict(Rc::new(RefCell::new(d))))
            }
            ExprKind::ListComp(elt, comps) => {
                let scope = Rc::new(Env {
                    vars: new_scope(),
                    parent: Some(env.clone()),
                    globals: env.globals.clone(),
                    global_names: RefCell::default(),
                });
                let mut out = Vec::new();
                self.comprehend(elt, comps, &scope, &mut out)?;
                Ok(Value::list(out))
            }
            ExprKind::Lambda(params, body) => {
                let (defaults, kwdefaults) = self.eval_defaults(params, env)?;
                Ok(Value::Function(Rc::new(Function {
                    name: "<lambda>".into(),
                    params: params.clone(),
                    defaults,
                    kwdefaults,
                    body: FuncBody::Lambda(Rc::new((**body).clone())),
                    closure: env.clone(),
                    attrs: RefCell::default(),
                    line: expr.line,
                })))
            }
            ExprKind::FString(parts) => {
                let mut out = String::new();
                for part in parts {
                    match part {
                        FPart::Lit(s) => out.push_str(s),
                        FPart::Expr { expr, conversion, spec } => {
                            let v = self.eval(expr, env)?;
                            let v = match conversion {
                                Some('r') => Value::str(v.repr()),
                                Some('s') => Value::str(v.to_str()),
                                _ => v,
                            };
                            out.push_str(&builtins::format_value(self, &v, spec)?);
                        }
                    }
                }
                Ok(Value::str(out))
            }
            ExprKind::Starred(_) => Err(self.error("SyntaxError", "can't use starred expression here")),
        }
    }

    fn eval_items(&mut self, items: &[Expr], env: &Rc<Env>) -> Result<Vec<Value>, Exc> {
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            if let ExprKind::Starred(inner) = &item.kind {
                let v = self.eval(inner, env)?;
                out.extend(self.iterate(&v)?);
            } else {
                out.push(self.eval(item, env)?);
            }
        }
        Ok(out)
    }

    fn comprehend(&mut self, elt: &Expr, comps: &[Comprehension], env: &Rc<Env>, out: &mut Vec<Value>) -> Result<(), Exc> {
        let Some((first, rest)) = comps.split_first() else {
            out.push(self.eval(elt, env)?);
            return Ok(());
        };
        let iter = self.eval(&first.iter, env)?;
        'items: for item in self.iterate(&iter)? {
            self.assign(&first.target, item, env)?;
            for cond in &first.conds {
                if !self.eval(cond, env)?.truthy() {
                    continue 'items;
                }
            }
            self.comprehend(elt, rest, env, out)?;
        }
        Ok(())
    }

    fn eval_args(&mut self, args: &[Arg], env: &Rc<Env>) -> Result<(Vec<Value>, Kwargs), Exc> {
        let mut pos = Vec::new();
        let mut kw = Vec::new();
        for a in args {
            match a {
                Arg::Pos(e) => pos.push(self.eval(e, env)?),
                Arg::Star(e) => {
                    let v = self.eval(e, env)?;
                    pos.extend(self.iterate(&v)?);
                }
                Arg::Kw(n, e) => kw.push((n.clone(), self.eval(e, env)?)),
                Arg::DoubleStar(e) => match self.eval(e, env)? {
                    Value::Dict(d) => {
                        for (k, v) in d.borrow().entries.iter() {
                            let Some(k) = k.as_str() else {
                                return Err(self.error("TypeError", "keywords must be strings"));
                            };
                            kw.push((k.to_string(), v.clone()));
                        }
                    }
                    other => {
                        return Err(self.error(
                            "TypeError",
                            format!("argument after ** must be a mapping, not {}", other.type_name()),
                        ))
                    }
                },
            }
        }
        Ok((pos, kw))
    }

    // ------------------------------------------------------------ calls

    pub fn call(&mut self, f: &Value, args: Vec<Value>, kwargs: Kwargs) -> Result<Value, Exc> {
        match f {
            Value::Function(func) => self.call_function(func, args, kwargs),
            Value::Builtin(b) => (b.func)(self, args, kwargs),
            Value::BoundMethod(m) => self.call_method(&m.0, &m.1, args, kwargs),
            Value::Native(n) => n.clone().call(self, args, kwargs),
            Value::ExcClass(c) => Ok(Value::Exception(Exc::new(c.clone(), args))),
            other => Err(self.error("TypeError", format!("'{}' object is not callable", other.type_name()))),
        }
    }

    pub fn call_function(&mut self, func: &Rc<Function>, args: Vec<Value>, kwargs: Kwargs) -> Result<Value, Exc> {
        if self.depth >= self.recursion_limit {
            return Err(self.error("RecursionError", "maximum recursion depth exceeded"));
        }
        let vars = self.bind_args(func, args, kwargs)?;
        let env = Rc::new(Env {
            vars,
            parent: Some(func.closure.clone()),
            globals: func.closure.globals.clone(),
            global_names: RefCell::default(),
        });
        let saved_line = self.line;
        self.depth += 1;
        let result = match &func.body {
            FuncBody::Block(body) => self.exec_block(body, &env).map(|ctl| match ctl {
                Ctl::Return(v) => v,
                _ => Value::None,
            }),
            FuncBody::Lambda(e) => self.eval(e, &env),
        };
        self.depth -= 1;
        self.line = saved_line;
        result
    }

    fn bind_args(&self, func: &Function, args: Vec<Value>, kwargs: Kwargs) -> Result<Scope, Exc> {
        let p = &func.params;
        let name = &func.name;
        let mut slots: Vec<Option<Value>> = vec![None; p.positional.len()];
        let mut kwslots: Vec<Option<Value>> = vec![None; p.kwonly.len()];
        let mut extra = Vec::new();
        let nargs = args.len();
        for (i, a) in args.into_iter().enumerate() {
            if i < slots.len() {
                slots[i] = Some(a);
            } else {
                extra.push(a);
            }
        }
        if !extra.is_empty() && p.varargs.is_none() {
            return Err(self.error(
                "TypeError",
                format!("{name}() takes {} positional arguments but {nargs} were given", p.positional.len()),
            ));
        }
        let mut varkw = Dict::default();
        for (k, v) in kwargs {
            if let Some(i) = p.positional.iter().position(|q| q.name == k) {
                if slots[i].is_some() {
                    return Err(self.error("TypeError", format!("{name}() got multiple values for argument '{k}'")));
                }
                slots[i] = Some(v);
            } else if let Some(i) = p.kwonly.iter().position(|q| q.name == k) {
                kwslots[i] = Some(v);
            } else if p.varkw.is_some() {
                varkw.insert(Value::str(&k), v);
            } else {
                return Err(self.error("TypeError", format!("{name}() got an unexpected keyword argument '{k}'")));
            }
        }
        let mut scope = IndexMap::new();
        let mut missing = Vec::new();
        for (i, (param, slot)) in p.positional.iter().zip(slots).enumerate() {
            match slot.or_else(|| func.defaults[i].clone()) {
                Some(v) => {
                    scope.insert(param.name.clone(), v);
                }
                None => missing.push(format!("'{}'", param.name)),
            }
        }
        if !missing.is_empty() {
            let plural = if missing.len() == 1 { "argument" } else { "arguments" };
            return Err(self.error(
                "TypeError",
                format!("{name}() missing {} required positional {plural}: {}", missing.len(), missing.join(" and ")),
            ));
        }
        for (i, (param, slot)) in p.kwonly.iter().zip(kwslots).enumerate() {
            match slot.or_else(|| func.kwdefaults[i].clone()) {
                Some(v) => {
                    scope.insert(param.name.clone(), v);
                }
                None => {
                    return Err(self.error(
                        "TypeError",
                        format!("{name}() missing 1 required keyword-only argument: '{}'", param.name),
                    ))
                }
            }
        }
        if let Some(v) = &p.varargs {
            scope.insert(v.clone(), Value::tuple(extra));
        }
        if let Some(k) = &p.varkw {
            scope.insert(k.clone(), Value::Dict(Rc::new(RefCell::new(varkw))));
        }
        Ok(Rc::new(RefCell::new(scope)))
    }

    pub fn call_method(&mut self, recv: &Value, name: &str, args: Vec<Value>, kwargs: Kwargs) -> Result<Value, Exc> {
        match recv {
            Value::Native(n) => {
                let n = n.clone();
                if let Some(r) = n.call_method(self, name, args.clone(), kwargs.clone()) {
                    return r;
                }
                let f = self.get_attr(recv, name)?;
                if let Value::BoundMethod(_) = f {
                    return Err(self.error(
                        "AttributeError",
                        format!("'{}' object has no attribute '{name}'", recv.type_name()),
                    ));
                }
                self.call(&f, args, kwargs)
            }
            Value::Module(_) | Value::Function(_) | Value::ExcClass(_) | Value::Builtin(_) => {
                let f = self.get_attr(recv, name)?;
                self.call(&f, args, kwargs)
            }
            _ => builtins::call_type_method(self, recv, name, args, kwargs),
        }
    }

    // ------------------------------------------------------------ attributes and items

    pub fn get_attr(&mut self, v: &Value, name: &str) -> Result<Value, Exc> {
        let found = match v {
            Value::Module(m) => m.attrs.borrow().get(name).cloned(),
            Value::Native(n) => {
                let n = n.clone();
                match n.get_attr(self, name) {
                    Some(r) => Some(r?),
                    None if n.has_method(name) => Some(Value::BoundMethod(Rc::new((v.clone(), name.to_string())))),
                    None => None,
                }
            }
            Value::Function(f) => match name {
                "__name__" => Some(Value::str(&f.name)),
                _ => f.attrs.borrow().get(name).cloned(),
            },
            Value::Builtin(b) if name == "__name__" => Some(Value::str(&b.name)),
            Value::ExcClass(c) if name == "__name__" => Some(Value::str(&c.name)),
            Value::Exception(e) if name == "args" => Some(Value::tuple(e.0.args.clone())),
            _ if builtins::has_type_method(v, name) => Some(Value::BoundMethod(Rc::new((v.clone(), name.to_string())))),
            _ => None,
        };
        found.ok_or_else(|| match v {
            Value::Module(m) => self.error("AttributeError", format!("module '{}' has no attribute '{name}'", m.name)),
            _ => self.error("AttributeError", format!("'{}' object has no attribute '{name}'", v.type_name())),
        })
    }

    pub fn set_attr(&mut self, target: &Value, name: &str, value: Value) -> Result<(), Exc> {
        match target {
            Value::Native(n) => n.clone().set_attr(self, name, value),
            Value::Function(f) => {
                f.attrs.borrow_mut().insert(name.to_string(), value);
                Ok(())
            }
            Value::Module(m) => {
                m.attrs.borrow_mut().insert(name.to_string(), value);
                Ok(())
            }
            other => Err(self.error(
                "AttributeError",
                format!("'{}' object has no attribute '{name}'", other.type_name()),
            )),
        }
    }

    fn index(&self, i: &Value, len: usize, what: &str) -> Result<usize, Exc> {
        let Some(i) = i.as_int() else {
            return Err(self.error(
                "TypeError",
                format!("{what} indices must be integers or slices, not {}", i.type_name()),
            ));
        };
        let len = len as i64;
        let j = if i < 0 { i + len } else { i };
        if j < 0 || j >= len {
            return Err(self.error("IndexError", format!("{what} index out of range")));
        }
        Ok(j as usize)
    }

    fn key_error(&self, key: &Value) -> Exc {
        let exc = Exc::new(self.exc_class("KeyError"), vec![key.clone()]);
        exc.0.line.set(Some(self.line));
        exc
    }

    pub fn get_item(&mut self, o: &Value, i: &Value) -> Result<Value, Exc> {
        match o {
            Value::List(l) => {
                let l = l.borrow();
                let at = self.index(i, l.len(), "list")?;
                Ok(l[at].clone())
            }
            Value::Tuple(t) => {
                let at = self.index(i, t.len(), "tuple")?;
                Ok(t[at].clone())
            }
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                let at = self.index(i, chars.len(), "string")?;
                Ok(Value::str(chars[at].to_string()))
            }
            Value::Range(a, b, s) => {
                let at = self.index(i, range_len(*a, *b, *s) as usize, "range object")?;
                Ok(Value::Int(a + at as i64 * s))
            }
            Value::Dict(d) => {
                let found = d.borrow().get(i).cloned();
                found.ok_or_else(|| self.key_error(i))
            }
            Value::Native(n) => {
                let n = n.clone();
                match n.call_method(self, "__getitem__", vec![i.clone()], Vec::new()) {
                    Some(r) => r,
                    None => Err(self.error("TypeError", format!("'{}' object is not subscriptable", o.type_name()))),
                }
            }
            _ => Err(self.error("TypeError", format!("'{}' object is not subscriptable", o.type_name()))),
        }
    }

    fn set_item(&mut self, o: &Value, i: Value, v: Value) -> Result<(), Exc> {
        match o {
            Value::List(l) => {
                let n = l.borrow().len();
                let at = self.index(&i, n, "list")?;
                l.borrow_mut()[at] = v;
                Ok(())
            }
            Value::Dict(d) => {
                d.borrow_mut().insert(i, v);
                Ok(())
            }
            _ => Err(self.error(
                "TypeError",
                format!("'{}' object does not support item assignment", o.type_name()),
            )),
        }
    }

    fn slice(&mut self, o: &Value, lo: Option<i64>, hi: Option<i64>, step: Option<i64>) -> Result<Value, Exc> {
        let step = step.unwrap_or(1);
        if step == 0 {
            return Err(self.error("ValueError", "slice step cannot be zero"));
        }
        let pick = |len: usize| -> Vec<usize> {
            let len = len as i64;
            let norm = |x: i64, lo_clamp: i64, hi_clamp: i64| {
                let x = if x < 0 { x + len } else { x };
                x.clamp(lo_clamp, hi_clamp)
            };
            let mut out = Vec::new();
            if step > 0 {
                let start = lo.map_or(0, |x| norm(x, 0, len));
                let stop = hi.map_or(len, |x| norm(x, 0, len));
                let mut k = start;
                while k < stop {
                    out.push(k as usize);
                    k += step;
                }
            } else {
                let start = lo.map_or(len - 1, |x| norm(x, -1, len - 1));
                let stop = hi.map_or(-1, |x| norm(x, -1, len - 1));
                let mut k = start;
                while k > stop {
                    out.push(k as usize);
                    k += step;
                }
            }
            out
        };
        match o {
            Value::List(l) => {
                let l = l.borrow();
                Ok(Value::list(pick(l.len()).into_iter().map(|k| l[k].clone()).collect()))
            }
            Value::Tuple(t) => Ok(Value::tuple(pick(t.len()).into_iter().map(|k| t[k].clone()).collect())),
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                Ok(Value::str(pick(chars.len()).into_iter().map(|k| chars[k]).collect::<String>()))
            }
            Value::Range(..) => {
                let items = self.iterate(o)?;
                Ok(Value::list(pick(items.len()).into_iter().map(|k| items[k].clone()).collect()))
            }
            _ => Err(self.error("TypeError", format!("'{}' object is not subscriptable", o.type_name()))),
        }
    }

    pub fn iterate(&mut self, v: &Value) -> Result<Vec<Value>, Exc> {
        match v {
            Value::List(l) | Value::Set(l) => Ok(l.borrow().clone()),
            Value::Tuple(t) => Ok(t.to_vec()),
            Value::Str(s) => Ok(s.chars().map(|c| Value::str(c.to_string())).collect()),
            Value::Dict(d) => Ok(d.borrow().entries.iter().map(|(k, _)| k.clone()).collect()),
            Value::Range(a, b, s) => {
                let n = range_len(*a, *b, *s);
                if n > 10_000_000 {
                    return Err(self.error("MemoryError", "range too large to materialize"));
                }
                Ok((0..n).map(|i| Value::Int(a + i * s)).collect())
            }
            Value::Native(n) => match n.clone().iterate(self) {
                Some(r) => r,
                None => Err(self.error("TypeError", format!("'{}' object is not iterable", v.type_name()))),
            },
            _ => Err(self.error("TypeError", format!("'{}' object is not iterable", v.type_name()))),
        }
    }

    // ------------------------------------------------------------ operators

    pub fn compare(&mut self, op: CmpOp, a: &Value, b: &Value) -> Result<bool, Exc> {
        use std::cmp::Ordering::*;
        Ok(match op {
            CmpOp::Eq => a.py_eq(b),
            CmpOp::Ne => !a.py_eq(b),
            CmpOp::Is => a.is(b),
            CmpOp::IsNot => !a.is(b),
            CmpOp::In => self.contains(b, a)?,
            CmpOp::NotIn => !self.contains(b, a)?,
            CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge => match a.py_cmp(b) {
                Some(ord) => match op {
                    CmpOp::Lt => ord == Less,
                    CmpOp::Le => ord != Greater,
                    CmpOp::Gt => ord == Greater,
                    _ => ord != Less,
                },
                None if a.is_number() && b.is_number() => false,
                None => {
                    return Err(self.error(
                        "TypeError",
                        format!(
                            "'{}' not supported between instances of '{}' and '{}'",
                            op.symbol(),
                            a.type_name(),
                            b.type_name()
                        ),
                    ))
                }
            },
        })
    }

    fn contains(&mut self, container: &Value, item: &Value) -> Result<bool, Exc> {
        match container {
            Value::Str(s) => match item {
                Value::Str(sub) => Ok(s.contains(&**sub)),
                _ => Err(self.error(
                    "TypeError",
                    format!("'in <string>' requires string as left operand, not {}", item.type_name()),
                )),
            },
            Value::Dict(d) => Ok(d.borrow().get(item).is_some()),
            Value::Range(a, b, s) => Ok(match item.as_int() {
                Some(i) if *s > 0 => i >= *a && i < *b && (i - a) % s == 0,
                Some(i) => i <= *a && i > *b && (a - i) % (-s) == 0,
                None => false,
            }),
            _ => Ok(self.iterate(container)?.iter().any(|x| x.py_eq(item))),
        }
    }

    pub fn unary(&mut self, op: UnaryOp, v: &Value) -> Result<Value, Exc> {
        match (op, v) {
            (UnaryOp::Not, v) => Ok(Value::Bool(!v.truthy())),
            (UnaryOp::Neg, Value::Float(f)) => Ok(Value::Float(-f)),
            (UnaryOp::Neg, v) if v.as_int().is_some() => v
                .as_int()
                .and_then(i64::checked_neg)
                .map(Value::Int)
                .ok_or_else(|| self.error("OverflowError", "integer overflow")),
            (UnaryOp::Pos, Value::Float(f)) => Ok(Value::Float(*f)),
            (UnaryOp::Pos, v) if v.as_int().is_some() => Ok(Value::Int(v.as_int().unwrap())),
            (UnaryOp::Invert, v) if v.as_int().is_some() => Ok(Value::Int(!v.as_int().unwrap())),
            (op, v) => {
                let sym = match op {
                    UnaryOp::Neg => "-",
                    UnaryOp::Pos => "+",
                    _ => "~",
                };
                Err(self.error("TypeError", format!("bad operand type for unary {sym}: '{}'", v.type_name())))
            }
        }
    }

    pub fn binop(&mut self, op: BinOp, a: &Value, b: &Value) -> Result<Value, Exc> {
        if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
            return self.int_binop(op, x, y);
        }
        if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
            return self.float_binop(op, x, y);
        }
        match (op, a, b) {
            (BinOp::Add, Value::Str(x), Value::Str(y)) => Ok(Value::str(format!("{x}{y}"))),
            (BinOp::Add, Value::List(x), Value::List(y)) => {
                let mut v = x.borrow().clone();
                v.extend(y.borrow().iter().cloned());
                Ok(Value::list(v))
            }
            (BinOp::Add, Value::Tuple(x), Value::Tuple(y)) => {
                Ok(Value::tuple(x.iter().chain(y.iter()).cloned().collect()))
            }
            (BinOp::Mul, seq, n) | (BinOp::Mul, n, seq)
                if n.as_int().is_some() && matches!(seq, Value::Str(_) | Value::List(_) | Value::Tuple(_)) =>
            {
                let k = n.as_int().unwrap().max(0) as usize;
                Ok(match seq {
                    Value::Str(s) => Value::str(s.repeat(k)),
                    Value::List(l) => {
                        let l = l.borrow();
                        Value::list((0..k).flat_map(|_| l.iter().cloned()).collect())
                    }
                    Value::Tuple(t) => Value::tuple((0..k).flat_map(|_| t.iter().cloned()).collect()),
                    _ => unreachable!(),
                })
            }
            (BinOp::Mod, Value::Str(fmt), args) => builtins::percent_format(self, fmt, args).map(Value::str),
            (BinOp::BitOr, Value::Dict(x), Value::Dict(y)) => {
                let mut d = x.borrow().clone();
                for (k, v) in y.borrow().entries.iter() {
                    d.insert(k.clone(), v.clone());
                }
                Ok(Value::Dict(Rc::new(RefCell::new(d))))
            }
            _ => Err(self.error(
                "TypeError",
                format!(
                    "unsupported operand type(s) for {}: '{}' and '{}'",
                    op.symbol(),
                    a.type_name(),
                    b.type_name()
                ),
            )),
        }
    }

    fn int_binop(&mut self, op: BinOp, x: i64, y: i64) -> Result<Value, Exc> {
        let overflow = |this: &Self| this.error("OverflowError", "integer overflow");
        let zero = |this: &Self| this.error("ZeroDivisionError", "integer division or modulo by zero");
        let r = match op {
            BinOp::Add => x.checked_add(y),
            BinOp::Sub => x.checked_sub(y),
            BinOp::Mul => x.checked_mul(y),
            BinOp::Div => {
                if y == 0 {
                    return Err(self.error("ZeroDivisionError", "division by zero"));
                }
                return Ok(Value::Float(x as f64 / y as f64));
            }
            BinOp::FloorDiv => {
                if y == 0 {
                    return Err(zero(self));
                }
                x.checked_div(y).map(|q| if (x % y != 0) && ((x < 0) != (y < 0)) { q - 1 } else { q })
            }
            BinOp::Mod => {
                if y == 0 {
                    return Err(zero(self));
                }
                x.checked_rem(y).map(|r| if r != 0 && ((r < 0) != (y < 0)) { r + y } else { r })
            }
            BinOp::Pow => {
                if y < 0 {
                    if x == 0 {
                        return Err(self.error("ZeroDivisionError", "0.0 cannot be raised to a negative power"));
                    }
                    return Ok(Value::Float((x as f64).powi(y as i32)));
                }
                u32::try_from(y).ok().and_then(|e| x.checked_pow(e))
            }
            BinOp::BitAnd => Some(x & y),
            BinOp::BitOr => Some(x | y),
            BinOp::BitXor => Some(x ^ y),
            BinOp::LShift => {
                if y < 0 {
                    return Err(self.error("ValueError", "negative shift count"));
                }
                u32::try_from(y).ok().and_then(|s| x.checked_shl(s)).filter(|r| r >> y == x)
            }
            BinOp::RShift => {
                if y < 0 {
                    return Err(self.error("ValueError", "negative shift count"));
                }
                Some(x >> y.min(63))
            }
        };
        r.map(Value::Int).ok_or_else(|| overflow(self))
    }

    fn float_binop(&mut self, op: BinOp, x: f64, y: f64) -> Result<Value, Exc> {
        let r = match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => {
                if y == 0.0 {
                    return Err(self.error("ZeroDivisionError", "float division by zero"));
                }
                x / y
            }
            BinOp::FloorDiv => {
                if y == 0.0 {
                    return Err(self.error("ZeroDivisionError", "float floor division by zero"));
                }
                (x / y).floor()
            }
            BinOp::Mod => {
                if y == 0.0 {
                    return Err(self.error("ZeroDivisionError", "float modulo"));
                }
                let r = x % y;
                if r != 0.0 && ((r < 0.0) != (y < 0.0)) {
                    r + y
                } else {
                    r
                }
            }
            BinOp::Pow => {
                if x == 0.0 && y < 0.0 {
                    return Err(self.error("ZeroDivisionError", "0.0 cannot be raised to a negative power"));
                }
                x.powf(y)
            }
            _ => {
                return Err(self.error(
                    "TypeError",
                    format!("unsupported operand type(s) for {}: 'float' and 'float'", op.symbol()),
                ))
            }
        };
        Ok(Value::Float(r))
    }

    fn to_exception(&self, v: Value) -> Result<Exc, Exc> {
        match v {
            Value::Exception(e) => {
                e.0.line.set(Some(self.line));
                Ok(e)
            }
            Value::ExcClass(c) => {
                let e = Exc::new(c, Vec::new());
                e.0.line.set(Some(self.line));
                Ok(e)
            }
            _ => Err(self.error("TypeError", "exceptions must derive from BaseException")),
        }
    }
}
