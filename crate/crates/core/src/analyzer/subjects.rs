//! Python-facing subject modules: the TCS and PCS mocks and the four
//! pin-based apps.

use std::any::Any;
use std::cell::Cell;
use std::rc::{Rc, Weak};

use pbtlang::builtins::bind;
use pbtlang::{Builtin, Exc, Interpreter, Kwargs, ModuleObj, NativeObject, Value};

use super::gpiozero::{gerr, InputObj, MotorObj, OutputObj};
use super::harness::{Ctx, Poll};
use crate::corpus::apps::{presence_lit, robot_step, theremin_volume};
use crate::corpus::gpio::GpioError;
use crate::corpus::tcs::{TARGET_HIGH, TARGET_LOW};
use crate::corpus::{
    pcs_execute_scenario, tcs_decide, tcs_execute_scenario, CorpusError, PcsConfig, Record, Scalar, TcsConfig, TcsDecision,
};

/// Field aliases the Python sources expose next to the schema names.
pub(crate) const ALIASES: &[(&str, &str)] = &[("heater_state", "heater_value"), ("cooler_state", "cooler_value")];

/// One recorded system state with its fields as attributes.
pub(crate) struct StateObj {
    kind: &'static str,
    pub record: Record,
}

pub(crate) fn scalar_value(s: Scalar) -> Value {
    match s {
        Scalar::Bool(b) => Value::Bool(b),
        Scalar::Int(i) => Value::Int(i),
        Scalar::Float(f) => Value::Float(f),
    }
}

pub(crate) fn state_value(kind: &'static str, record: Record) -> Value {
    Value::native(StateObj { kind, record })
}

impl NativeObject for StateObj {
    fn type_name(&self) -> String {
        self.kind.into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let field = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, f)| f);
        self.record.get(field).map(|v| Ok(scalar_value(v)))
    }

    fn repr(&self) -> String {
        let fields: Vec<String> = self.record.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.kind, fields.join(", "))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn corpus_err(interp: &Interpreter, e: CorpusError) -> Exc {
    interp.error("ValueError", e.to_string())
}

fn num(interp: &Interpreter, v: Option<&Value>, what: &str) -> Result<f64, Exc> {
    let v = v.ok_or_else(|| interp.error("TypeError", format!("missing required argument: '{what}'")))?;
    match v {
        Value::Bool(_) => Err(interp.error("TypeError", format!("{what} must be a number, not bool"))),
        v => v
            .as_f64()
            .ok_or_else(|| interp.error("TypeError", format!("{what} must be a number, not {}", v.type_name()))),
    }
}

/// Positional or keyword argument, with `...` standing for the default.
fn given(v: &Option<Value>) -> Option<&Value> {
    v.as_ref().filter(|v| !matches!(v, Value::Ellipsis))
}

fn num_or(interp: &Interpreter, v: &Option<Value>, what: &str, default: f64) -> Result<f64, Exc> {
    match given(v) {
        Some(x) => num(interp, Some(x), what),
        None => Ok(default),
    }
}

fn int_or(interp: &Interpreter, v: &Option<Value>, what: &str, default: i64) -> Result<i64, Exc> {
    match given(v) {
        Some(x) => x
            .as_int()
            .ok_or_else(|| interp.error("TypeError", format!("{what} must be an integer, not {}", x.type_name()))),
        None => Ok(default),
    }
}

fn trace_value<S>(states: Vec<S>, kind: &'static str, rec: impl Fn(&S) -> Record) -> Value {
    Value::list(states.iter().map(|s| state_value(kind, rec(s))).collect())
}

struct MockRoom(TcsConfig<f64>);

impl NativeObject for MockRoom {
    fn type_name(&self) -> String {
        "MockRoom".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let c = &self.0;
        Some(Ok(match name {
            "total_time" => Value::Float(c.total_time),
            "sensor_interval" => Value::Float(c.sensor_interval),
            "control_interval" => Value::Float(c.control_interval),
            "initial_temp" => Value::from(c.initial_temp),
            _ => return None,
        }))
    }

    fn has_method(&self, name: &str) -> bool {
        name == "execute_scenario"
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        (name == "execute_scenario").then(|| {
            tcs_execute_scenario(self.0.clone())
                .map(|s| trace_value(s, "SystemState", |s| s.record()))
                .map_err(|e| corpus_err(interp, e))
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct MockSystem(PcsConfig<f64>);

impl NativeObject for MockSystem {
    fn type_name(&self) -> String {
        "MockSystem".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let c = &self.0;
        Some(Ok(Value::Float(match name {
            "total_time" => c.total_time,
            "cylinder_interval" => c.cylinder_interval,
            "controller_interval" => c.controller_interval,
            "mock_interval" => c.mock_interval,
            _ => return None,
        })))
    }

    fn has_method(&self, name: &str) -> bool {
        name == "execute_scenario"
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        (name == "execute_scenario").then(|| {
            pcs_execute_scenario(self.0.clone())
                .map(|s| trace_value(s, "SystemState", |s| s.record()))
                .map_err(|e| corpus_err(interp, e))
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn tcs_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let room = Builtin::value("MockRoom", move |i, args, kw| {
        let names = ["total_time", "sensor_interval", "control_interval", "initial_temp", "seed"];
        let s = bind(i, "MockRoom", &names, args, kw)?;
        let initial_temp = match given(&s[3]) {
            None | Some(Value::None) => None,
            Some(v) => Some(num(i, Some(v), "initial_temp")?),
        };
        let seed = match given(&s[4]) {
            None | Some(Value::None) => c.next_seed(),
            Some(v) => v.as_int().ok_or_else(|| i.error("TypeError", "seed must be an integer"))? as u64,
        };
        let cfg = TcsConfig {
            total_time: num(i, s[0].as_ref(), "total_time")?,
            sensor_interval: num(i, s[1].as_ref(), "sensor_interval")?,
            control_interval: num(i, s[2].as_ref(), "control_interval")?,
            initial_temp,
            seed,
        };
        cfg.validate().map_err(|e| corpus_err(i, e))?;
        Ok(Value::native(MockRoom(cfg)))
    });
    let decide = Builtin::value("decide", |i, args, _| {
        let t = num(i, args.first(), "temp")?;
        let d = tcs_decide(t).map_err(|e| corpus_err(i, e))?;
        Ok(Value::str(match d {
            TcsDecision::Heat => "heat",
            TcsDecision::Cool => "cool",
            TcsDecision::Off => "off",
        }))
    });
    vec![
        ("MockRoom".into(), room),
        ("decide".into(), decide),
        ("TARGET_LOW".into(), Value::Float(TARGET_LOW)),
        ("TARGET_HIGH".into(), Value::Float(TARGET_HIGH)),
    ]
}

fn pcs_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let system = Builtin::value("MockSystem", move |i, args, kw| {
        let names = ["total_time", "cylinder_interval", "controller_interval", "mock_interval", "seed"];
        let s = bind(i, "MockSystem", &names, args, kw)?;
        let seed = match given(&s[4]) {
            None | Some(Value::None) => c.next_seed(),
            Some(v) => v.as_int().ok_or_else(|| i.error("TypeError", "seed must be an integer"))? as u64,
        };
        let cfg = PcsConfig {
            total_time: num(i, s[0].as_ref(), "total_time")?,
            cylinder_interval: num(i, s[1].as_ref(), "cylinder_interval")?,
            controller_interval: num(i, s[2].as_ref(), "controller_interval")?,
            mock_interval: num(i, s[3].as_ref(), "mock_interval")?,
            seed,
        };
        cfg.validate().map_err(|e| corpus_err(i, e))?;
        Ok(Value::native(MockSystem(cfg)))
    });
    vec![("MockSystem".into(), system)]
}

struct Tripwire {
    me: Weak<Tripwire>,
    ldr: Rc<InputObj>,
    threshold: f64,
    intruder: Cell<bool>,
}

impl NativeObject for Tripwire {
    fn type_name(&self) -> String {
        "LaserTripwire".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        Some(Ok(match name {
            "ldr" => Value::Native(self.ldr.clone()),
            "threshold" => Value::Float(self.threshold),
            "intruder" => Value::Bool(self.intruder.get()),
            _ => return None,
        }))
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "check" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, kw: Kwargs) -> Option<Result<Value, Exc>> {
        match name {
            "check" => Some(self.check(interp, args, kw)),
            "close" => {
                self.ldr.dev.borrow_mut().close();
                Some(Ok(Value::None))
            }
            _ => None,
        }
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(Value::Native(self.me.upgrade().expect("live")))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.ldr.dev.borrow_mut().close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

impl Tripwire {
    fn check(&self, interp: &mut Interpreter, args: Vec<Value>, kw: Kwargs) -> Result<Value, Exc> {
        let s = bind(interp, "check", &["light_level"], args, kw)?;
        let level = match &s[0] {
            None | Some(Value::None) => f64::from(u8::from(self.ldr.is_active(interp)?)),
            Some(v) => {
                let l = num(interp, Some(v), "light_level")?;
                if !(0.0..=1.0).contains(&l) {
                    return Err(interp.error("ValueError", format!("light level must be between 0 and 1, not {l}")));
                }
                l
            }
        };
        let intruder = level < self.threshold;
        if intruder {
            interp.stdout.push_str("INTRUDER\n");
        }
        self.intruder.set(intruder);
        Ok(Value::Bool(intruder))
    }
}

/// Line follower; polls its sensors whenever simulated time passes.
struct Robot {
    me: Weak<Robot>,
    left_motor: Value,
    right_motor: Value,
    left_sensor: Rc<InputObj>,
    right_sensor: Rc<InputObj>,
    speed: f64,
}

fn motor<'a>(interp: &Interpreter, v: &'a Value) -> Result<&'a MotorObj, Exc> {
    v.downcast::<MotorObj>()
        .ok_or_else(|| interp.error("TypeError", format!("expected a Motor, got {}", v.type_name())))
}

impl Robot {
    fn update(&self, interp: &mut Interpreter) -> Result<(), Exc> {
        let (l, r) = (self.left_sensor.is_active(interp)?, self.right_sensor.is_active(interp)?);
        let (lm, rm) = (motor(interp, &self.left_motor)?, motor(interp, &self.right_motor)?);
        let prev = (lm.dev.borrow().value(), rm.dev.borrow().value());
        let s = robot_step(prev, l, r, self.speed).map_err(|e| interp.error("ValueError", e.to_string()))?;
        lm.dev.borrow_mut().set_value(s.left_motor).map_err(|e| gerr(interp, e))?;
        rm.dev.borrow_mut().set_value(s.right_motor).map_err(|e| gerr(interp, e))
    }

    fn close(&self) {
        self.left_sensor.dev.borrow_mut().close();
        self.right_sensor.dev.borrow_mut().close();
    }
}

impl Poll for Robot {
    fn poll(&self, interp: &mut Interpreter) -> Result<(), Exc> {
        if self.left_sensor.dev.borrow().closed() {
            return Ok(());
        }
        self.update(interp)
    }
}

impl NativeObject for Robot {
    fn type_name(&self) -> String {
        "LineFollowingRobot".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        Some(Ok(match name {
            "left_motor" => self.left_motor.clone(),
            "right_motor" => self.right_motor.clone(),
            "left_sensor" => Value::Native(self.left_sensor.clone()),
            "right_sensor" => Value::Native(self.right_sensor.clone()),
            "speed" => Value::Float(self.speed),
            _ => return None,
        }))
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "update" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        match name {
            "update" => Some(self.update(interp).map(|_| Value::None)),
            "close" => {
                self.close();
                Some(Ok(Value::None))
            }
            _ => None,
        }
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(Value::Native(self.me.upgrade().expect("live")))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct Theremin {
    me: Weak<Theremin>,
    echo: Rc<InputObj>,
    trigger: Rc<OutputObj>,
    buzzer: Rc<OutputObj>,
    max_range: f64,
}

impl Theremin {
    fn volume_for(&self, interp: &Interpreter, args: &[Value]) -> Result<f64, Exc> {
        let d = num(interp, args.first(), "distance")?;
        theremin_volume(d, self.max_range).map_err(|e| interp.error("ValueError", e.to_string()))
    }

    fn close(&self) {
        self.echo.dev.borrow_mut().close();
        self.trigger.dev.borrow_mut().close();
        self.buzzer.dev.borrow_mut().close();
    }
}

impl NativeObject for Theremin {
    fn type_name(&self) -> String {
        "UltrasonicTheremin".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        Some(Ok(match name {
            "volume" => Value::Float(self.buzzer.dev.borrow().value()),
            "max_range" => Value::Float(self.max_range),
            "buzzer" => Value::Native(self.buzzer.clone()),
            "echo" => Value::Native(self.echo.clone()),
            "trigger" => Value::Native(self.trigger.clone()),
            _ => return None,
        }))
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "volume_for" | "update" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        Some(match name {
            "volume_for" => self.volume_for(interp, &args).map(Value::Float),
            "update" => self.volume_for(interp, &args).and_then(|v| {
                self.buzzer.dev.borrow_mut().set_value(v).map_err(|e| gerr(interp, e))?;
                Ok(Value::Float(v))
            }),
            "close" => {
                self.close();
                Ok(Value::None)
            }
            _ => return None,
        })
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(Value::Native(self.me.upgrade().expect("live")))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct Presence {
    me: Weak<Presence>,
    leds: Vec<Rc<OutputObj>>,
    count: Cell<i64>,
}

impl Presence {
    fn lit(&self) -> usize {
        self.leds.iter().filter(|l| l.dev.borrow().is_lit()).count()
    }

    fn close(&self) {
        self.leds.iter().for_each(|l| l.dev.borrow_mut().close());
    }
}

impl NativeObject for Presence {
    fn type_name(&self) -> String {
        "PresenceIndicator".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        Some(Ok(match name {
            "lit_leds" => Value::Int(self.lit() as i64),
            "count" | "present_count" => Value::Int(self.count.get()),
            "leds" => Value::list(self.leds.iter().map(|l| Value::Native(l.clone())).collect()),
            _ => return None,
        }))
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "update" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        Some(match name {
            "update" => (|| {
                let count = match args.first() {
                    Some(Value::Int(c)) => *c,
                    Some(v) => return Err(interp.error("TypeError", format!("count must be an integer, not {}", v.type_name()))),
                    None => return Err(interp.error("TypeError", "update() missing required argument: 'count'")),
                };
                let lit = presence_lit(count, self.leds.len()).map_err(|e| interp.error("ValueError", e.to_string()))?;
                for (k, led) in self.leds.iter().enumerate() {
                    let v = if k < lit { 1.0 } else { 0.0 };
                    led.dev.borrow_mut().set_value(v).map_err(|e| gerr(interp, e))?;
                }
                self.count.set(count);
                Ok(Value::Int(lit as i64))
            })(),
            "close" => {
                self.close();
                Ok(Value::None)
            }
            _ => return None,
        })
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(Value::Native(self.me.upgrade().expect("live")))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn close_all(inputs: &[&Rc<InputObj>], outputs: &[&Rc<OutputObj>]) {
    inputs.iter().for_each(|d| d.dev.borrow_mut().close());
    outputs.iter().for_each(|d| d.dev.borrow_mut().close());
}

fn tripwire_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let class = Builtin::value("LaserTripwire", move |i, args, kw| {
        let s = bind(i, "LaserTripwire", &["ldr_pin", "threshold"], args, kw)?;
        let pin = int_or(i, &s[0], "ldr_pin", 4)?;
        let threshold = num_or(i, &s[1], "threshold", 0.5)?;
        let ldr = InputObj::create(i, &c.factory(), "LightSensor", Some(pin), Some(false), None)?;
        Ok(Value::Native(Rc::new_cyclic(|me| Tripwire { me: me.clone(), ldr, threshold, intruder: Cell::new(false) })))
    });
    vec![("LaserTripwire".into(), class)]
}

fn robot_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let class = Builtin::value("LineFollowingRobot", move |i, args, kw| {
        let names = ["left_motor", "right_motor", "left_sensor_pin", "right_sensor_pin", "speed"];
        let s = bind(i, "LineFollowingRobot", &names, args, kw)?;
        let left_motor = given(&s[0]).cloned().ok_or_else(|| i.error("TypeError", "missing left_motor"))?;
        let right_motor = given(&s[1]).cloned().ok_or_else(|| i.error("TypeError", "missing right_motor"))?;
        motor(i, &left_motor)?;
        motor(i, &right_motor)?;
        let lp = int_or(i, &s[2], "left_sensor_pin", 17)?;
        let rp = int_or(i, &s[3], "right_sensor_pin", 27)?;
        let speed = num_or(i, &s[4], "speed", 0.5)?;
        if !(0.0..=1.0).contains(&speed) {
            return Err(gerr(i, GpioError::BadValue(format!("speed must be between 0 and 1, not {speed}"))));
        }
        let factory = c.factory();
        let left_sensor = InputObj::create(i, &factory, "LineSensor", Some(lp), Some(false), None)?;
        let right_sensor = match InputObj::create(i, &factory, "LineSensor", Some(rp), Some(false), None) {
            Ok(d) => d,
            Err(e) => {
                close_all(&[&left_sensor], &[]);
                return Err(e);
            }
        };
        let robot = Rc::new_cyclic(|me| Robot { me: me.clone(), left_motor, right_motor, left_sensor, right_sensor, speed });
        robot.update(i)?;
        let weak: Weak<dyn Poll> = Rc::downgrade(&robot) as Weak<dyn Poll>;
        c.live.borrow_mut().push(weak);
        Ok(Value::Native(robot))
    });
    vec![("LineFollowingRobot".into(), class)]
}

fn theremin_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let class = Builtin::value("UltrasonicTheremin", move |i, args, kw| {
        let s = bind(i, "UltrasonicTheremin", &["echo", "trigger", "buzzer_pin", "max_range"], args, kw)?;
        let echo = int_or(i, &s[0], "echo", 17)?;
        let trigger = int_or(i, &s[1], "trigger", 4)?;
        let buzzer = int_or(i, &s[2], "buzzer_pin", 18)?;
        let max_range = num_or(i, &s[3], "max_range", 2.0)?;
        if !(max_range > 0.0 && max_range.is_finite()) {
            return Err(i.error("ValueError", format!("max_range must be positive, not {max_range}")));
        }
        let factory = c.factory();
        let echo = InputObj::create(i, &factory, "InputDevice", Some(echo), Some(false), None)?;
        let trigger = OutputObj::create(i, &factory, "OutputDevice", trigger, false).inspect_err(|_| close_all(&[&echo], &[]))?;
        let buzzer = OutputObj::create(i, &factory, "PWMOutputDevice", buzzer, true)
            .inspect_err(|_| close_all(&[&echo], &[&trigger]))?;
        Ok(Value::Native(Rc::new_cyclic(|me| Theremin { me: me.clone(), echo, trigger, buzzer, max_range })))
    });
    vec![("UltrasonicTheremin".into(), class)]
}

fn presence_module(ctx: &Rc<Ctx>) -> Vec<(String, Value)> {
    let c = ctx.clone();
    let class = Builtin::value("PresenceIndicator", move |i, args, kw| {
        let s = bind(i, "PresenceIndicator", &["led_pins"], args, kw)?;
        let pins: Vec<i64> = match given(&s[0]) {
            None => vec![5, 6, 13, 19],
            Some(v) => i
                .iterate(v)?
                .iter()
                .map(|p| p.as_int().ok_or_else(|| i.error("TypeError", "led pins must be integers")))
                .collect::<Result<_, _>>()?,
        };
        let factory = c.factory();
        let mut leds: Vec<Rc<OutputObj>> = Vec::new();
        for p in pins {
            match OutputObj::create(i, &factory, "LED", p, false) {
                Ok(l) => leds.push(l),
                Err(e) => {
                    close_all(&[], &leds.iter().collect::<Vec<_>>());
                    return Err(e);
                }
            }
        }
        Ok(Value::Native(Rc::new_cyclic(|me| Presence { me: me.clone(), leds, count: Cell::new(0) })))
    });
    vec![("PresenceIndicator".into(), class)]
}

type ModuleBody = fn(&Rc<Ctx>) -> Vec<(String, Value)>;

const MODULES: &[(&str, ModuleBody)] = &[
    ("tcs", tcs_module),
    ("pcs", pcs_module),
    ("laser_tripwire", tripwire_module),
    ("line_following_robot", robot_module),
    ("ultrasonic_theremin", theremin_module),
    ("presence_indicator", presence_module),
];

/// Registers each subject module under its bare name, `src.<name>` and the
/// repository-style `examples.gpiozero.apps.<name>.src.<name>`.
pub(crate) fn register(interp: &mut Interpreter, ctx: &Rc<Ctx>) {
    for &(name, body) in MODULES {
        for path in [name.to_string(), format!("src.{name}"), format!("examples.gpiozero.apps.{name}.src.{name}")] {
            let c = ctx.clone();
            let module_name = path.clone();
            interp.register_module(&path, move |_| Ok(ModuleObj::value(module_name.clone(), body(&c))));
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::analyzer::harness::{run_harness, HarnessOptions};
    use crate::analyzer::OutcomeClass;

    fn run(subject: &str, src: &str) -> (OutcomeClass, String) {
        let r = run_harness(src, &HarnessOptions::new(subject));
        (r.class, r.message)
    }

    #[test]
    fn pcs_listing_runs_verbatim() {
        let src = r#"
from hypothesis import given, strategies as st
from examples.gpiozero.apps.pcs.src.pcs import MockSystem


# Test that the cylinder locations remain within the bounds (0 and 2) at all times.
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinder_location_in_bounds(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    for state in collected_states:
        assert 0 <= state.cylinder_a_loc <= 2, f"Cylinder A out of bounds: {state.cylinder_a_loc}"
        assert 0 <= state.cylinder_b_location <= 2, f"Cylinder B out of bounds: {state.cylinder_b_location}"
"#;
        assert_eq!(run("pcs", src), (OutcomeClass::Pass, String::new()));
    }

    #[test]
    fn tcs_states_expose_aliases_and_bad_config_is_value_error() {
        let src = r#"
import pytest
from src.tcs import MockRoom

def test_room():
    states = MockRoom(10, 1, 1, initial_temp=30).execute_scenario()
    assert len(states) == 10
    assert states[0].cooler_state == states[0].cooler_value == 1
    with pytest.raises(ValueError):
        MockRoom(10, 0, 1)
"#;
        assert_eq!(run("tcs", src), (OutcomeClass::Pass, String::new()));
    }

    #[test]
    fn robot_follows_sensors_after_sleep() {
        let src = r#"
import time
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory
from line_following_robot import LineFollowingRobot

def test_turn():
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False), ..., speed=0.25) as lfr:
        assert lfr.left_motor.value == 0.25 and lfr.right_motor.value == 0.25
        lfr.right_sensor.pin.drive_high()
        time.sleep(0.1)
        assert lfr.left_motor.value == 0.25
        assert lfr.right_motor.value == -0.25
"#;
        assert_eq!(run("line_following_robot", src), (OutcomeClass::Pass, String::new()));
    }

    #[test]
    fn apps_behave() {
        let src = r#"
from laser_tripwire import LaserTripwire
from ultrasonic_theremin import UltrasonicTheremin
from presence_indicator import PresenceIndicator

def test_apps(capsys):
    t = LaserTripwire()
    assert t.check(0.2)
    assert capsys.readouterr().out == "INTRUDER\n"
    t.ldr.pin.drive_high()
    assert not t.check()
    t.close()
    th = UltrasonicTheremin()
    assert th.update(0.5) == 0.75 and th.volume == 0.75
    p = PresenceIndicator()
    assert p.update(25) == 2 and p.lit_leds == 2
    assert p.update(1000) == 4
"#;
        assert_eq!(run("laser_tripwire", src), (OutcomeClass::Pass, String::new()));
    }
}
