//! Runtime guards lifted from the per-state assertions of verified PBTs, and
//! a monitor that checks them one step ahead of the plant.

use std::collections::HashMap;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use pbtlang::ast::{BinOp, BoolOp, CmpOp, Constant, Expr, ExprKind, Stmt, StmtKind, Target, UnaryOp};
use pbtlang::{Interpreter, Value};
use serde::{Deserialize, Serialize};

use crate::analyzer::subjects::{state_value, ALIASES};
use crate::corpus::{inject_fault, scenario_for, schema_of, CorpusError, FaultSpec, Record};
use crate::orchestrator::{GeneratedPbt, PbtStatus};

#[derive(Debug, thiserror::Error)]
pub enum GuardError {
    #[error("{pbt}: PBT is not verified")]
    NotVerified { pbt: String },
    #[error("{pbt}: cannot parse source: {msg}")]
    Syntax { pbt: String, msg: String },
    #[error("{pbt}: no assertions inside a loop over collected states")]
    NoStateLoop { pbt: String },
    #[error("{pbt}: unsupported assertions:\n{}", .exprs.join("\n"))]
    Unsupported { pbt: String, exprs: Vec<String> },
    #[error("guard {guard}: subject '{subject}' has no state field '{field}'")]
    UnknownField { guard: String, subject: String, field: String },
    #[error("guard {guard}: closed bound must be finite")]
    InfiniteBound { guard: String },
    #[error("guard {guard}: expression '{text}' failed: {msg}")]
    Expression { guard: String, text: String, msg: String },
    #[error("ticks must be positive")]
    NoTicks,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {msg}")]
    File { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Bool(bool),
    Num(f64),
}

impl Literal {
    fn as_f64(self) -> f64 {
        match self {
            Literal::Bool(b) => f64::from(u8::from(b)),
            Literal::Num(x) => x,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(true) => f.write_str("True"),
            Literal::Bool(false) => f.write_str("False"),
            Literal::Num(x) => f.write_str(&num(*x)),
        }
    }
}

/// One predicate over state fields. A guard holds the conjunction of its
/// constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    Interval {
        field: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<Bound>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<Bound>,
    },
    Equals {
        field: String,
        value: Literal,
    },
    Implies {
        when: Vec<Constraint>,
        then: Vec<Constraint>,
    },
    /// Python expression over `state`; for hand-written guards.
    Expression {
        text: String,
    },
}

impl Constraint {
    pub fn fields(&self) -> Vec<String> {
        match self {
            Constraint::Interval { field, .. } | Constraint::Equals { field, .. } => vec![field.clone()],
            Constraint::Implies { when, then } => when.iter().chain(then).flat_map(Constraint::fields).collect(),
            Constraint::Expression { text } => pbtlang::parse_expression(text).map(|e| state_fields(&e)).unwrap_or_default(),
        }
    }

    fn check_bounds(&self) -> bool {
        match self {
            Constraint::Interval { lo, hi, .. } => [lo, hi].into_iter().flatten().all(|b| !b.closed || b.value.is_finite()),
            Constraint::Implies { when, then } => when.iter().chain(then).all(Constraint::check_bounds),
            _ => true,
        }
    }
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn join(cs: &[Constraint]) -> String {
    cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" and ")
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Interval { field, lo, hi } => {
                let op = |b: &Bound| if b.closed { "<=" } else { "<" };
                match (lo, hi) {
                    (Some(l), Some(h)) => write!(f, "{} {} {field} {} {}", num(l.value), op(l), op(h), num(h.value)),
                    (Some(l), None) => write!(f, "{field} {} {}", if l.closed { ">=" } else { ">" }, num(l.value)),
                    (None, Some(h)) => write!(f, "{field} {} {}", op(h), num(h.value)),
                    (None, None) => write!(f, "{field} is any"),
                }
            }
            Constraint::Equals { field, value } => write!(f, "{field} == {value}"),
            Constraint::Implies { when, then } => write!(f, "({}) implies ({})", join(when), join(then)),
            Constraint::Expression { text } => f.write_str(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardSpec {
    pub guard_id: String,
    pub property_text: String,
    pub constraints: Vec<Constraint>,
    pub origin_pbt: String,
}

impl GuardSpec {
    pub fn fields(&self) -> Vec<String> {
        self.constraints.iter().flat_map(Constraint::fields).collect()
    }
}

/// Guard file: a reviewable JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardFile {
    pub subject_id: String,
    pub guards: Vec<GuardSpec>,
}

impl GuardFile {
    pub fn load(path: &Path) -> Result<Self, GuardError> {
        let err = |msg: String| GuardError::File { path: path.to_path_buf(), msg };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), GuardError> {
        let text = serde_json::to_string_pretty(self).expect("guards serialize") + "\n";
        std::fs::write(path, text).map_err(|e| GuardError::File { path: path.to_path_buf(), msg: e.to_string() })
    }
}

// ------------------------------------------------------------ compilation

fn canonical(field: &str) -> String {
    ALIASES.iter().find(|(a, _)| *a == field).map_or(field, |(_, f)| f).to_string()
}

fn state_fields(e: &Expr) -> Vec<String> {
    let mut out = Vec::new();
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::Attribute(base, attr) => {
                if matches!(&base.kind, ExprKind::Name(n) if n == "state") {
                    out.push(canonical(attr));
                } else {
                    walk(base, out);
                }
            }
            ExprKind::Compare(l, rest) => {
                walk(l, out);
                rest.iter().for_each(|(_, r)| walk(r, out));
            }
            ExprKind::Bin(_, a, b) => {
                walk(a, out);
                walk(b, out);
            }
            ExprKind::Unary(_, a) => walk(a, out),
            ExprKind::Bool(_, xs) | ExprKind::Tuple(xs) | ExprKind::List(xs) => xs.iter().for_each(|x| walk(x, out)),
            ExprKind::Call(f, args) => {
                walk(f, out);
                for a in args {
                    if let pbtlang::ast::Arg::Pos(x) | pbtlang::ast::Arg::Kw(_, x) = a {
                        walk(x, out);
                    }
                }
            }
            ExprKind::IfExp { test, body, orelse } => {
                walk(test, out);
                walk(body, out);
                walk(orelse, out);
            }
            _ => {}
        }
    }
    walk(e, &mut out);
    out
}

enum Operand {
    Field(String),
    Const(Literal),
}

/// Translation context for one loop body.
struct Lift<'a> {
    var: &'a str,
    aliases: HashMap<String, Expr>,
}

impl Lift<'_> {
    fn operand(&self, e: &Expr) -> Option<Operand> {
        match &e.kind {
            ExprKind::Attribute(base, attr) if matches!(&base.kind, ExprKind::Name(n) if n == self.var) => {
                Some(Operand::Field(canonical(attr)))
            }
            ExprKind::Subscript(base, key) if matches!(&base.kind, ExprKind::Name(n) if n == self.var) => match &key.kind {
                ExprKind::Const(Constant::Str(s)) => Some(Operand::Field(canonical(s))),
                _ => None,
            },
            ExprKind::Name(n) => self.aliases.get(n).and_then(|x| self.operand(x)),
            _ => constant(e).map(Operand::Const),
        }
    }

    fn atom_pair(&self, l: &Expr, op: CmpOp, r: &Expr) -> Option<Constraint> {
        let (field, op, c) = match (self.operand(l)?, self.operand(r)?) {
            (Operand::Field(f), Operand::Const(c)) => (f, op, c),
            (Operand::Const(c), Operand::Field(f)) => (f, flip(op)?, c),
            _ => return None,
        };
        let bound = |closed| Some(Bound { value: c.as_f64(), closed });
        Some(match op {
            CmpOp::Lt => Constraint::Interval { field, lo: None, hi: bound(false) },
            CmpOp::Le => Constraint::Interval { field, lo: None, hi: bound(true) },
            CmpOp::Gt => Constraint::Interval { field, lo: bound(false), hi: None },
            CmpOp::Ge => Constraint::Interval { field, lo: bound(true), hi: None },
            CmpOp::Eq | CmpOp::Is => Constraint::Equals { field, value: c },
            _ => return None,
        })
    }

    /// Conjunction of constraints equivalent to `e`, if `e` is in the grammar.
    fn conj(&self, e: &Expr) -> Option<Vec<Constraint>> {
        match &e.kind {
            ExprKind::Compare(first, rest) => {
                let mut out: Vec<Constraint> = Vec::new();
                let mut left = first.as_ref();
                for (op, right) in rest {
                    let c = self.atom_pair(left, *op, right)?;
                    match (out.last_mut(), c) {
                        (
                            Some(Constraint::Interval { field: f0, lo: l0, hi: h0 }),
                            Constraint::Interval { field, lo, hi },
                        ) if *f0 == field && (l0.is_none() || lo.is_none()) && (h0.is_none() || hi.is_none()) => {
                            *l0 = l0.or(lo);
                            *h0 = h0.or(hi);
                        }
                        (_, c) => out.push(c),
                    }
                    left = right;
                }
                Some(out)
            }
            ExprKind::Bool(BoolOp::And, xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(self.conj(x)?);
                }
                Some(out)
            }
            // `not A or B`
            ExprKind::Bool(BoolOp::Or, xs) if xs.len() == 2 => match &xs[0].kind {
                ExprKind::Unary(UnaryOp::Not, a) => {
                    Some(vec![Constraint::Implies { when: self.conj(a)?, then: self.conj(&xs[1])? }])
                }
                _ => None,
            },
            ExprKind::Unary(UnaryOp::Not, inner) => match &inner.kind {
                // `not (A and B)` reads as A implies not B.
                ExprKind::Bool(BoolOp::And, xs) if xs.len() == 2 => {
                    let then = self.conj(&xs[1])?;
                    let [single] = <[Constraint; 1]>::try_from(then).ok()?;
                    Some(vec![Constraint::Implies { when: self.conj(&xs[0])?, then: vec![negate(single)?] }])
                }
                _ => {
                    let [single] = <[Constraint; 1]>::try_from(self.conj(inner)?).ok()?;
                    Some(vec![negate(single)?])
                }
            },
            _ => match self.operand(e)? {
                Operand::Field(field) => Some(vec![Constraint::Equals { field, value: Literal::Bool(true) }]),
                Operand::Const(_) => None,
            },
        }
    }
}

fn flip(op: CmpOp) -> Option<CmpOp> {
    Some(match op {
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Gt => CmpOp::Lt,
        CmpOp::Ge => CmpOp::Le,
        CmpOp::Eq => CmpOp::Eq,
        CmpOp::Is => CmpOp::Is,
        _ => return None,
    })
}

fn negate(c: Constraint) -> Option<Constraint> {
    match c {
        Constraint::Equals { field, value: Literal::Bool(b) } => Some(Constraint::Equals { field, value: Literal::Bool(!b) }),
        Constraint::Interval { field, lo: Some(l), hi: None } => {
            Some(Constraint::Interval { field, lo: None, hi: Some(Bound { value: l.value, closed: !l.closed }) })
        }
        Constraint::Interval { field, lo: None, hi: Some(h) } => {
            Some(Constraint::Interval { field, lo: Some(Bound { value: h.value, closed: !h.closed }), hi: None })
        }
        _ => None,
    }
}

fn constant(e: &Expr) -> Option<Literal> {
    match &e.kind {
        ExprKind::Const(Constant::Bool(b)) => Some(Literal::Bool(*b)),
        ExprKind::Const(Constant::Int(i)) => Some(Literal::Num(*i as f64)),
        ExprKind::Const(Constant::Float(x)) => Some(Literal::Num(*x)),
        ExprKind::Unary(UnaryOp::Neg, a) => Some(Literal::Num(-constant(a)?.as_f64())),
        ExprKind::Unary(UnaryOp::Pos, a) => Some(Literal::Num(constant(a)?.as_f64())),
        ExprKind::Bin(op, a, b) => {
            let (a, b) = (constant(a)?.as_f64(), constant(b)?.as_f64());
            Some(Literal::Num(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if b != 0.0 => a / b,
                _ => return None,
            }))
        }
        _ => None,
    }
}

/// Assertions found under per-state loops, each with the conditions of the
/// enclosing `if` statements.
struct Found<'a> {
    var: String,
    aliases: HashMap<String, Expr>,
    conds: Vec<&'a Expr>,
    test: &'a Expr,
    line: usize,
}

fn scan_loop<'a>(var: &str, body: &'a [Stmt], aliases: &mut HashMap<String, Expr>, conds: &mut Vec<&'a Expr>, out: &mut Vec<Found<'a>>) {
    for s in body {
        match &s.kind {
            StmtKind::Assert(test, _) => out.push(Found {
                var: var.to_string(),
                aliases: aliases.clone(),
                conds: conds.clone(),
                test,
                line: s.line,
            }),
            StmtKind::Assign(targets, value) => {
                for t in targets {
                    if let Target::Name(n) = t {
                        aliases.insert(n.clone(), value.clone());
                    }
                }
            }
            StmtKind::If(test, then, orelse) if orelse.is_empty() => {
                conds.push(test);
                scan_loop(var, then, aliases, conds, out);
                conds.pop();
            }
            _ => {}
        }
    }
}

fn find_loops<'a>(body: &'a [Stmt], out: &mut Vec<Found<'a>>) {
    for s in body {
        match &s.kind {
            StmtKind::For(Target::Name(var), _, inner, _) => {
                let before = out.len();
                scan_loop(var, inner, &mut HashMap::new(), &mut Vec::new(), out);
                if out.len() == before {
                    find_loops(inner, out);
                }
            }
            StmtKind::For(_, _, inner, _) | StmtKind::While(_, inner, _) | StmtKind::With(_, inner) => find_loops(inner, out),
            StmtKind::If(_, a, b) => {
                find_loops(a, out);
                find_loops(b, out);
            }
            StmtKind::Try(a, handlers, c, d) => {
                find_loops(a, out);
                handlers.iter().for_each(|h| find_loops(&h.body, out));
                find_loops(c, out);
                find_loops(d, out);
            }
            StmtKind::FunctionDef(f) => find_loops(&f.body, out),
            _ => {}
        }
    }
}

/// Lifts the per-state assertions of a PBT source into guards.
pub fn compile_source(pbt_id: &str, property_text: &str, source: &str, subject_id: &str) -> Result<Vec<GuardSpec>, GuardError> {
    let module = pbtlang::parse_module(source).map_err(|e| GuardError::Syntax { pbt: pbt_id.into(), msg: e.to_string() })?;
    let mut found = Vec::new();
    for s in &module.body {
        if let StmtKind::FunctionDef(f) = &s.kind {
            if f.name.starts_with("test") {
                find_loops(&f.body, &mut found);
            }
        }
    }
    if found.is_empty() {
        return Err(GuardError::NoStateLoop { pbt: pbt_id.into() });
    }
    let lines: Vec<&str> = source.lines().collect();
    let mut guards = Vec::new();
    let mut unsupported = Vec::new();
    for f in found {
        let lift = Lift { var: &f.var, aliases: f.aliases };
        let mut when = Vec::new();
        let mut ok = true;
        for c in &f.conds {
            match lift.conj(c) {
                Some(cs) => when.extend(cs),
                None => ok = false,
            }
        }
        let then = lift.conj(f.test);
        match (ok, then) {
            (true, Some(then)) => {
                let constraints = if when.is_empty() { then } else { vec![Constraint::Implies { when, then }] };
                guards.push(GuardSpec {
                    guard_id: format!("{pbt_id}-g{}", guards.len() + 1),
                    property_text: property_text.to_string(),
                    constraints,
                    origin_pbt: pbt_id.to_string(),
                });
            }
            _ => {
                let text = lines.get(f.line.wrapping_sub(1)).map_or("", |l| l.trim());
                unsupported.push(format!("line {}: {text}", f.line));
            }
        }
    }
    if !unsupported.is_empty() {
        return Err(GuardError::Unsupported { pbt: pbt_id.into(), exprs: unsupported });
    }
    check_guards(subject_id, &guards)?;
    Ok(guards)
}

pub fn compile_guards(pbt: &GeneratedPbt, subject_id: &str) -> Result<Vec<GuardSpec>, GuardError> {
    if pbt.status != PbtStatus::Verified {
        return Err(GuardError::NotVerified { pbt: pbt.pbt_id.clone() });
    }
    compile_source(&pbt.pbt_id, &pbt.property_text, &pbt.source, subject_id)
}

/// Configuration check run before any tick.
pub fn check_guards(subject_id: &str, guards: &[GuardSpec]) -> Result<(), GuardError> {
    let schema = schema_of(subject_id)?;
    for g in guards {
        if let Some(field) = g.fields().into_iter().find(|f| !schema.contains(&f.as_str())) {
            return Err(GuardError::UnknownField { guard: g.guard_id.clone(), subject: subject_id.into(), field });
        }
        if !g.constraints.iter().all(Constraint::check_bounds) {
            return Err(GuardError::InfiniteBound { guard: g.guard_id.clone() });
        }
    }
    Ok(())
}

// ------------------------------------------------------------ monitoring

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonitorMode {
    Warn,
    Block,
}

impl std::str::FromStr for MonitorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "warn" => Ok(MonitorMode::Warn),
            "block" => Ok(MonitorMode::Block),
            other => Err(format!("unknown policy '{other}' (expected warn or block)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonitorPolicy {
    pub mode: MonitorMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlertAction {
    Warned,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlertEvent {
    pub tick: u64,
    pub guard_id: String,
    pub state_snapshot: Record,
    pub action: AlertAction,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRun {
    pub trace: Vec<Record>,
    pub events: Vec<AlertEvent>,
}

impl MonitorRun {
    pub fn blocked(&self) -> bool {
        self.events.iter().any(|e| e.action == AlertAction::Blocked)
    }
}

/// Evaluates guards against records.
pub struct GuardChecker {
    guards: Vec<GuardSpec>,
    interp: Option<Interpreter>,
    exprs: HashMap<String, Value>,
}

impl GuardChecker {
    pub fn new(guards: Vec<GuardSpec>) -> Result<Self, GuardError> {
        fn collect(c: &Constraint, out: &mut Vec<String>) {
            match c {
                Constraint::Expression { text } => out.push(text.clone()),
                Constraint::Implies { when, then } => when.iter().chain(then).for_each(|c| collect(c, out)),
                _ => {}
            }
        }
        let mut texts: Vec<(String, String)> = Vec::new();
        for g in &guards {
            let mut own = Vec::new();
            g.constraints.iter().for_each(|c| collect(c, &mut own));
            texts.extend(own.into_iter().map(|t| (t, g.guard_id.clone())));
        }
        let mut checker = Self { guards, interp: None, exprs: HashMap::new() };
        if texts.is_empty() {
            return Ok(checker);
        }
        let mut interp = Interpreter::new();
        for (text, guard) in texts {
            if checker.exprs.contains_key(&text) {
                continue;
            }
            let src = format!("def __guard(state):\n    return ({text})\n");
            let scope = match pbtlang::run_source(&mut interp, &src) {
                Ok(s) => s,
                Err(e) => return Err(GuardError::Expression { guard, text, msg: format!("{e:?}") }),
            };
            let f = scope.borrow().get("__guard").cloned().expect("just defined");
            checker.exprs.insert(text, f);
        }
        checker.interp = Some(interp);
        Ok(checker)
    }

    pub fn guards(&self) -> &[GuardSpec] {
        &self.guards
    }

    fn holds(&mut self, c: &Constraint, rec: &Record) -> Result<bool, String> {
        let value = |field: &str| rec.get(field).map(|v| v.as_f64()).ok_or_else(|| format!("record has no field '{field}'"));
        Ok(match c {
            Constraint::Interval { field, lo, hi } => {
                let v = value(field)?;
                let lo_ok = lo.is_none_or(|b| if b.closed { v >= b.value } else { v > b.value });
                let hi_ok = hi.is_none_or(|b| if b.closed { v <= b.value } else { v < b.value });
                lo_ok && hi_ok
            }
            Constraint::Equals { field, value: lit } => value(field)? == lit.as_f64(),
            Constraint::Implies { when, then } => {
                for w in when {
                    if !self.holds(w, rec)? {
                        return Ok(true);
                    }
                }
                for t in then {
                    if !self.holds(t, rec)? {
                        return Ok(false);
                    }
                }
                true
            }
            Constraint::Expression { text } => {
                let f = self.exprs[text].clone();
                let interp = self.interp.as_mut().expect("expressions compiled");
                let state = state_value("SystemState", rec.clone());
                let v = interp.call(&f, vec![state], Vec::new()).map_err(|e| e.to_string())?;
                v.truthy()
            }
        })
    }

    /// Violated guards as `(guard_id, detail)`.
    pub fn violations(&mut self, rec: &Record) -> Result<Vec<(String, String)>, GuardError> {
        let mut out = Vec::new();
        for gi in 0..self.guards.len() {
            let constraints = self.guards[gi].constraints.clone();
            let id = self.guards[gi].guard_id.clone();
            let mut failed = Vec::new();
            for c in &constraints {
                let ok = self
                    .holds(c, rec)
                    .map_err(|msg| GuardError::Expression { guard: id.clone(), text: c.to_string(), msg })?;
                if !ok {
                    failed.push(describe(c, rec));
                }
            }
            if !failed.is_empty() {
                out.push((id, failed.join("; ")));
            }
        }
        Ok(out)
    }
}

fn describe(c: &Constraint, rec: &Record) -> String {
    let shown: Vec<String> = {
        let mut fs = c.fields();
        fs.dedup();
        fs.iter().filter_map(|f| rec.get(f).map(|v| format!("{f}={v}"))).collect()
    };
    if shown.is_empty() {
        format!("violates {c}")
    } else {
        format!("{} violates {c}", shown.join(", "))
    }
}

/// Runs a healthy (optionally faulted) scenario with the monitor between
/// controller and plant. Guards see the state each proposed command would
/// produce.
pub fn run_monitored(
    subject_id: &str,
    guards: &[GuardSpec],
    policy: MonitorPolicy,
    ticks: u32,
    fault: Option<&FaultSpec>,
    seed: u64,
) -> Result<MonitorRun, GuardError> {
    if ticks == 0 {
        return Err(GuardError::NoTicks);
    }
    check_guards(subject_id, guards)?;
    let mut checker = GuardChecker::new(guards.to_vec())?;
    let mut sc = scenario_for(subject_id, ticks, seed)?;
    if let Some(f) = fault {
        sc = inject_fault(sc, f.clone())?;
    }
    let mut trace = Vec::new();
    let mut events = Vec::new();
    while let Some(cmd) = sc.next_tick() {
        let predicted = sc.preview(&cmd);
        let violated = checker.violations(&predicted)?;
        let tick = predicted.get("tick").map_or(trace.len() as u64, |t| t.as_f64() as u64);
        let action = match policy.mode {
            MonitorMode::Block if !violated.is_empty() => AlertAction::Blocked,
            _ => AlertAction::Warned,
        };
        for (guard_id, detail) in violated.iter().cloned() {
            events.push(AlertEvent { tick, guard_id, state_snapshot: predicted.clone(), action, detail });
        }
        let applied = if action == AlertAction::Blocked { sc.safe_command() } else { cmd };
        trace.push(sc.commit(&applied));
    }
    Ok(MonitorRun { trace, events })
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), GuardError> {
    let err = |e: std::io::Error| GuardError::File { path: path.to_path_buf(), msg: e.to_string() };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(err)?);
    for item in items {
        serde_json::to_writer(&mut f, item).expect("record serializes");
        f.write_all(b"\n").map_err(err)?;
    }
    f.flush().map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUNDS_PBT: &str = r#"
from hypothesis import given, settings, strategies as st
from src.pcs import MockSystem

# Test that the cylinder locations remain within the bounds [0, 2]
@given(
    total_time=st.integers(min_value=10, max_value=40),
    cylinder_interval=st.floats(min_value=0.5, max_value=1.5),
)
@settings(max_examples=20)
def test_cylinder_locations_within_bounds(total_time, cylinder_interval):
    system = MockSystem(total_time, cylinder_interval, 1, 1)
    states = system.execute_scenario()
    for state in states:
        assert 0 <= state.cylinder_a_loc <= 2
        assert 0 <= state.cylinder_b_location <= 2
"#;

    fn closed(v: f64) -> Option<Bound> {
        Some(Bound { value: v, closed: true })
    }

    #[test]
    fn listing_two_gives_two_intervals() {
        let g = compile_source("pcs-t", "bounds", BOUNDS_PBT, "pcs").unwrap();
        let cs: Vec<_> = g.iter().map(|g| g.constraints.clone()).collect();
        assert_eq!(
            cs,
            [
                vec![Constraint::Interval { field: "cylinder_a_loc".into(), lo: closed(0.0), hi: closed(2.0) }],
                vec![Constraint::Interval { field: "cylinder_b_location".into(), lo: closed(0.0), hi: closed(2.0) }],
            ]
        );
        assert_eq!(g[0].to_owned().constraints[0].to_string(), "0 <= cylinder_a_loc <= 2");
    }

    #[test]
    fn implication_forms() {
        let src = "def test_x(s):\n    for st in s:\n        if 21 <= st.temp <= 23:\n            assert st.heater_state == 0 and st.cooler_state == 0\n        assert not (st.heater_value == 1 and st.cooler_value > 0)\n        assert not st.temp > 30 or st.cooler_value == 1\n";
        let g = compile_source("tcs-x", "p", src, "tcs").unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|g| matches!(g.constraints[..], [Constraint::Implies { .. }])));
        let rec = |t: f64, h: f64, c: f64| Record {
            fields: vec![
                ("temp", crate::corpus::Scalar::Float(t)),
                ("heater_value", crate::corpus::Scalar::Float(h)),
                ("cooler_value", crate::corpus::Scalar::Float(c)),
                ("outside_air_temp", crate::corpus::Scalar::Float(0.0)),
                ("tick", crate::corpus::Scalar::Int(0)),
            ],
        };
        let mut chk = GuardChecker::new(g).unwrap();
        assert!(chk.violations(&rec(22.0, 0.0, 0.0)).unwrap().is_empty());
        assert_eq!(chk.violations(&rec(22.0, 1.0, 0.0)).unwrap().len(), 1);
        assert_eq!(chk.violations(&rec(31.0, 1.0, 1.0)).unwrap().len(), 1);
        assert_eq!(chk.violations(&rec(31.0, 0.0, 0.0)).unwrap().len(), 1);
    }

    #[test]
    fn extraction_errors() {
        let no_loop = "def test_x(s):\n    states = run()\n    assert states[-1].temp < 30\n";
        assert!(matches!(compile_source("p", "p", no_loop, "tcs"), Err(GuardError::NoStateLoop { .. })));
        let odd = "def test_x(s):\n    for st in s:\n        assert st.temp != 30\n";
        let err = compile_source("p", "p", odd, "tcs").unwrap_err();
        assert!(err.to_string().contains("assert st.temp != 30"), "{err}");
        let unknown = "def test_x(s):\n    for st in s:\n        assert st.pressure < 3\n";
        assert!(matches!(compile_source("p", "p", unknown, "tcs"), Err(GuardError::UnknownField { .. })));
    }

    #[test]
    fn hand_written_expression_guard() {
        let g = GuardSpec {
            guard_id: "h1".into(),
            property_text: "not both moving".into(),
            constraints: vec![Constraint::Expression { text: "not (state.a_moving and state.b_moving)".into() }],
            origin_pbt: "hand".into(),
        };
        check_guards("pcs", std::slice::from_ref(&g)).unwrap();
        let run = run_monitored("pcs", &[g], MonitorPolicy { mode: MonitorMode::Warn }, 30, None, 3).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.trace.len(), 30);
    }

    #[test]
    fn forced_location_warn_and_block() {
        let guards = compile_source("pcs-t", "bounds", BOUNDS_PBT, "pcs").unwrap();
        let fault: FaultSpec = "force:cylinder_a_loc=2.5@5".parse().unwrap();
        let warn = run_monitored("pcs", &guards, MonitorPolicy { mode: MonitorMode::Warn }, 40, Some(&fault), 0).unwrap();
        assert_eq!(warn.events.len(), 1);
        assert_eq!((warn.events[0].tick, warn.events[0].guard_id.as_str()), (5, "pcs-t-g1"));
        let block = run_monitored("pcs", &guards, MonitorPolicy { mode: MonitorMode::Block }, 40, Some(&fault), 0).unwrap();
        assert_eq!(block.events.len(), 1);
        assert_eq!(block.events[0].action, AlertAction::Blocked);
        let after = &block.trace[5];
        assert_eq!(after.get("a_moving"), Some(crate::corpus::Scalar::Bool(false)));
        assert_eq!(after.get("b_moving"), Some(crate::corpus::Scalar::Bool(false)));
    }

    #[test]
    fn guard_file_round_trips() {
        let guards = compile_source("pcs-t", "bounds", BOUNDS_PBT, "pcs").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let file = GuardFile { subject_id: "pcs".into(), guards };
        file.save(&path).unwrap();
        assert_eq!(GuardFile::load(&path).unwrap(), file);
    }
}
