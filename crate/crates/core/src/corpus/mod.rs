//! Deterministic renditions of the subject programs: simulated plants,
//! controllers, a mock GPIO layer and the small pin-based apps.

pub mod apps;
pub mod clock;
pub mod fault;
pub mod gpio;
pub mod pcs;
pub mod tcs;

use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

pub use clock::{CallbackId, ClockError, VirtualClock};
pub use fault::{inject_fault, Fault, FaultSpec};
pub use pcs::{pcs_execute_scenario, Motion, PcsCommand, PcsConfig, PcsSim, PcsState};
pub use tcs::{tcs_decide, tcs_execute_scenario, TcsCommand, TcsConfig, TcsDecision, TcsSim, TcsState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown subject '{0}'")]
    UnknownSubject(String),
    #[error("subject '{subject}' has no state field '{field}'")]
    UnknownField { subject: String, field: String },
    #[error("bad fault descriptor '{0}'")]
    BadFault(String),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// One state-field value in a trace record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
}

impl Scalar {
    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Bool(b) => f64::from(u8::from(b)),
            Scalar::Int(i) => i as f64,
            Scalar::Float(f) => f,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(true) => f.write_str("True"),
            Scalar::Bool(false) => f.write_str("False"),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => f.write_str(&pbtlang::value::float_repr(*x)),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Scalar::Bool(b) => s.serialize_bool(b),
            Scalar::Int(i) => s.serialize_i64(i),
            Scalar::Float(x) => s.serialize_f64(x),
        }
    }
}

/// A state snapshot with its fields in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub fields: Vec<(&'static str, Scalar)>,
}

impl Record {
    pub fn get(&self, name: &str) -> Option<Scalar> {
        self.fields.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    /// Overwrites an existing field, converting `value` to the field's kind.
    pub fn set(&mut self, name: &str, value: Scalar) -> bool {
        let Some(slot) = self.fields.iter_mut().find(|(k, _)| *k == name) else {
            return false;
        };
        slot.1 = match (slot.1, value) {
            (Scalar::Float(_), v) => Scalar::Float(v.as_f64()),
            (Scalar::Int(_), Scalar::Float(f)) => Scalar::Int(f as i64),
            (Scalar::Bool(_), v) => Scalar::Bool(v.as_f64() != 0.0),
            (_, v) => v,
        };
        true
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Tcs(TcsCommand),
    Pcs(PcsCommand),
}

/// A controller command as seen by a monitor.
///
/// `forced` carries field overrides injected by a fault; they only take
/// effect if this exact command reaches the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub action: Action,
    pub forced: Vec<(String, Scalar)>,
}

impl Command {
    pub fn new(action: Action) -> Self {
        Self { action, forced: Vec::new() }
    }

    pub(crate) fn apply_forced(&self, rec: &mut Record) {
        for (field, v) in &self.forced {
            rec.set(field, *v);
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.action {
            Action::Tcs(c) => write!(f, "heater={} cooler={}", u8::from(c.heater_on), u8::from(c.cooler_on))?,
            Action::Pcs(c) => write!(f, "a={:?} b={:?}", c.a, c.b)?,
        }
        for (k, v) in &self.forced {
            write!(f, " {k}:={v}")?;
        }
        Ok(())
    }
}

/// Step-wise view of a running scenario, used by monitors that need to see a
/// command before the plant applies it.
pub trait Scenario {
    fn subject(&self) -> &'static str;

    fn schema(&self) -> &'static [&'static str];

    /// Runs sensor and controller events up to the next plant step and
    /// returns the command the controller proposes for it.
    fn next_tick(&mut self) -> Option<Command>;

    /// The record the plant would produce under `cmd`, without applying it.
    fn preview(&self, cmd: &Command) -> Record;

    fn commit(&mut self, cmd: &Command) -> Record;

    fn safe_command(&self) -> Command;
}

/// Runs a scenario without interference.
pub fn run_unmonitored(sc: &mut dyn Scenario) -> Vec<Record> {
    let mut out = Vec::new();
    while let Some(cmd) = sc.next_tick() {
        out.push(sc.commit(&cmd));
    }
    out
}

pub const SCENARIO_SUBJECTS: &[&str] = &["tcs", "pcs"];

pub const TCS_SCHEMA: &[&str] = &["temp", "heater_value", "cooler_value", "outside_air_temp", "tick"];
pub const PCS_SCHEMA: &[&str] = &["cylinder_a_loc", "cylinder_b_location", "a_moving", "b_moving", "tick"];

pub fn schema_of(subject: &str) -> Result<&'static [&'static str], CorpusError> {
    match subject {
        "tcs" => Ok(TCS_SCHEMA),
        "pcs" => Ok(PCS_SCHEMA),
        other => Err(CorpusError::UnknownSubject(other.to_string())),
    }
}

/// Builds a healthy scenario with unit intervals lasting `ticks` plant steps.
pub fn scenario_for(subject: &str, ticks: u32, seed: u64) -> Result<Box<dyn Scenario>, CorpusError> {
    let total = f64::from(ticks);
    match subject {
        "tcs" => Ok(Box::new(TcsSim::new(TcsConfig { seed, ..TcsConfig::with_total(total) })?)),
        "pcs" => Ok(Box::new(PcsSim::new(PcsConfig { seed, ..PcsConfig::with_total(total) })?)),
        other => Err(CorpusError::UnknownSubject(other.to_string())),
    }
}

/// Schedules `count` firings of one component at `k * interval`.
#[derive(Debug, Clone)]
pub(crate) struct Periodic<F> {
    pub id: CallbackId,
    pub interval: F,
    pub count: u64,
    pub fired: u64,
}

impl<F: num_traits::Float> Periodic<F> {
    pub fn new(clock: &mut VirtualClock<F>, interval: F, total: F) -> Result<Self, CorpusError> {
        let id = clock.register();
        let count = if total <= F::zero() { 0 } else { (total / interval).floor().to_u64().unwrap_or(0) };
        let p = Self { id, interval, count, fired: 0 };
        if count > 0 {
            clock.schedule(F::zero(), id)?;
        }
        Ok(p)
    }

    /// Marks one firing done and schedules the next, if any.
    pub fn fire(&mut self, clock: &mut VirtualClock<F>) -> Result<(), CorpusError> {
        self.fired += 1;
        if self.fired < self.count {
            let k = F::from(self.fired).expect("tick count fits the scalar type");
            clock.schedule(k * self.interval, self.id)?;
        }
        Ok(())
    }
}

pub(crate) fn check_interval<F: num_traits::Float>(name: &str, v: F) -> Result<(), CorpusError> {
    if v.is_finite() && v > F::zero() {
        Ok(())
    } else {
        Err(CorpusError::Config(format!("{name} must be a positive finite number")))
    }
}
