//! Python-facing `gpiozero` over the mock pin layer in `corpus::gpio`.

use std::any::Any;
use std::cell::{Cell, RefCell};
use std::rc::{Rc, Weak};

use pbtlang::builtins::bind;
use pbtlang::{Builtin, Exc, Interpreter, Kwargs, ModuleObj, NativeObject, Value};

use super::harness::Ctx;
use crate::corpus::gpio::{FactoryRef, Function, GpioError, InputDevice, MockFactory, MockPin, Motor, OutputDevice, Pull};

pub(crate) const EXC_NAMES: &[&str] = &[
    "GPIOZeroError",
    "BadPinFactory",
    "DeviceClosed",
    "GPIODeviceError",
    "GPIODeviceClosed",
    "GPIOPinInUse",
    "GPIOPinMissing",
    "PinError",
    "PinInvalidFunction",
    "PinInvalidState",
    "PinInvalidPull",
    "PinInvalidPin",
    "PinSetInput",
    "PinFixedPull",
];

pub(crate) fn gerr(interp: &Interpreter, e: GpioError) -> Exc {
    interp.error(e.class_name(), e.to_string())
}

fn upgrade<T: NativeObject>(me: &Weak<T>) -> Value {
    Value::Native(me.upgrade().expect("native outlives its own method call"))
}

fn float_arg(interp: &Interpreter, v: &Value, what: &str) -> Result<f64, Exc> {
    v.as_f64()
        .ok_or_else(|| interp.error("TypeError", format!("{what} must be a number, not {}", v.type_name())))
}

fn pin_arg(interp: &Interpreter, v: Option<&Value>) -> Result<Option<i64>, Exc> {
    match v {
        None | Some(Value::None) => Ok(None),
        Some(Value::Str(s)) => {
            let digits = s.strip_prefix("GPIO").or_else(|| s.strip_prefix("BCM")).unwrap_or(s);
            digits.parse().map(Some).map_err(|_| gerr(interp, GpioError::InvalidPin(s.to_string())))
        }
        Some(v) => v
            .as_int()
            .filter(|_| !matches!(v, Value::Bool(_)))
            .map(Some)
            .ok_or_else(|| gerr(interp, GpioError::InvalidPin(v.repr()))),
    }
}

fn required_pin(interp: &Interpreter, v: Option<&Value>, what: &str) -> Result<i64, Exc> {
    pin_arg(interp, v)?.ok_or_else(|| interp.error("GPIOPinMissing", format!("No pin given for {what}")))
}

/// The factory named by a `pin_factory=` argument, else the current default.
fn factory_arg(ctx: &Ctx, v: Option<&Value>) -> FactoryRef {
    v.and_then(|v| v.downcast::<FactoryObj>()).map_or_else(|| ctx.factory(), |f| f.0.clone())
}

fn opt_bool(v: Option<&Value>) -> Option<bool> {
    match v {
        None | Some(Value::None) => None,
        Some(v) => Some(v.truthy()),
    }
}

pub(crate) struct PinObj(pub MockPin);

impl NativeObject for PinObj {
    fn type_name(&self) -> String {
        "MockPin".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let p = &self.0;
        Some(Ok(match name {
            "number" => Value::Int(p.number().into()),
            "name" => Value::str(p.name()),
            "state" => Value::Bool(p.is_high()),
            "function" => Value::str(p.function().as_str()),
            "pull" => Value::str(p.pull().as_str()),
            _ => return None,
        }))
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, value: Value) -> Result<(), Exc> {
        let p = &self.0;
        match name {
            "state" => p.set_state(value.truthy()).map_err(|e| gerr(interp, e)),
            "function" => {
                let f = match value.as_str() {
                    Some("input") => Function::Input,
                    Some("output") => Function::Output,
                    _ => return Err(interp.error("PinInvalidFunction", format!("invalid function \"{}\"", value.to_str()))),
                };
                p.set_function(f);
                Ok(())
            }
            "pull" => {
                let pull = value
                    .as_str()
                    .and_then(Pull::parse)
                    .ok_or_else(|| interp.error("PinInvalidPull", format!("invalid pull \"{}\"", value.to_str())))?;
                p.set_pull(pull).map_err(|e| gerr(interp, e))
            }
            _ => Err(interp.error("AttributeError", format!("'MockPin' object has no attribute '{name}'"))),
        }
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "drive_high" | "drive_low")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        let r = match name {
            "drive_high" => self.0.drive_high(),
            "drive_low" => self.0.drive_low(),
            _ => return None,
        };
        Some(r.map(|_| Value::None).map_err(|e| gerr(interp, e)))
    }

    fn repr(&self) -> String {
        self.0.name()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) struct FactoryObj(pub FactoryRef);

impl NativeObject for FactoryObj {
    fn type_name(&self) -> String {
        "MockFactory".into()
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "pin" | "reset" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        Some(match name {
            "pin" => required_pin(interp, args.first(), "pin()")
                .and_then(|n| self.0.pin(n).map_err(|e| gerr(interp, e)))
                .map(|p| Value::native(PinObj(p))),
            "reset" | "close" => {
                self.0.reset();
                Ok(Value::None)
            }
            _ => return None,
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// `Device`: only the class-level `pin_factory` property is modelled.
struct DeviceClass(Rc<Ctx>);

impl NativeObject for DeviceClass {
    fn type_name(&self) -> String {
        "type".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        (name == "pin_factory").then(|| Ok(Value::native(FactoryObj(self.0.factory()))))
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, value: Value) -> Result<(), Exc> {
        if name != "pin_factory" {
            return Err(interp.error("AttributeError", format!("type object 'Device' has no attribute '{name}'")));
        }
        let f = match &value {
            Value::None => MockFactory::new(),
            v => match v.downcast::<FactoryObj>() {
                Some(f) => f.0.clone(),
                None => return Err(interp.error("BadPinFactory", format!("{} is not a pin factory", v.repr()))),
            },
        };
        *self.0.factory.borrow_mut() = f;
        Ok(())
    }

    fn repr(&self) -> String {
        "<class 'gpiozero.Device'>".into()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) struct InputObj {
    me: Weak<InputObj>,
    kind: &'static str,
    pub dev: RefCell<InputDevice>,
}

impl InputObj {
    pub fn create(
        interp: &Interpreter,
        factory: &MockFactory,
        kind: &'static str,
        pin: Option<i64>,
        pull_up: Option<bool>,
        active_state: Option<bool>,
    ) -> Result<Rc<Self>, Exc> {
        let dev = InputDevice::new(factory, pin, pull_up, active_state).map_err(|e| match e {
            GpioError::InvalidPin(p) if p == "None" => interp.error("GPIODeviceError", "No pin given"),
            e => gerr(interp, e),
        })?;
        Ok(Rc::new_cyclic(|me| InputObj { me: me.clone(), kind, dev: RefCell::new(dev) }))
    }

    pub fn is_active(&self, interp: &Interpreter) -> Result<bool, Exc> {
        self.dev.borrow().is_active().map_err(|e| gerr(interp, e))
    }
}

impl NativeObject for InputObj {
    fn type_name(&self) -> String {
        self.kind.into()
    }

    fn get_attr(&self, interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let d = self.dev.borrow();
        let e = |e| gerr(interp, e);
        Some(match name {
            "pin" => Ok(d.pin().map_or(Value::None, |p| Value::native(PinObj(p.clone())))),
            "closed" => Ok(Value::Bool(d.closed())),
            "is_active" | "line_detected" | "light_detected" | "is_pressed" => d.is_active().map(Value::Bool).map_err(e),
            "value" if self.kind == "LightSensor" => d.value().map(|v| Value::Float(v as f64)).map_err(e),
            "value" => d.value().map(Value::Int).map_err(e),
            "pull_up" => d.pull_up().map(Value::from).map_err(e),
            "active_state" => Ok(Value::Bool(d.active_state())),
            _ => return None,
        })
    }

    fn has_method(&self, name: &str) -> bool {
        name == "close"
    }

    fn call_method(&self, _i: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        (name == "close").then(|| {
            self.dev.borrow_mut().close();
            Ok(Value::None)
        })
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(upgrade(&self.me))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.dev.borrow_mut().close();
        Ok(false)
    }

    fn repr(&self) -> String {
        let d = self.dev.borrow();
        match d.pin() {
            Some(p) => format!("<gpiozero.{} object on pin {}, is_active={}>", self.kind, p.name(), d.is_active().unwrap_or(false)),
            None => format!("<gpiozero.{} object closed>", self.kind),
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) struct OutputObj {
    me: Weak<OutputObj>,
    kind: &'static str,
    pub dev: RefCell<OutputDevice>,
}

impl OutputObj {
    pub fn create(interp: &Interpreter, factory: &MockFactory, kind: &'static str, pin: i64, pwm: bool) -> Result<Rc<Self>, Exc> {
        let dev = OutputDevice::new(factory, pin, pwm).map_err(|e| gerr(interp, e))?;
        Ok(Rc::new_cyclic(|me| OutputObj { me: me.clone(), kind, dev: RefCell::new(dev) }))
    }

    fn set(&self, interp: &Interpreter, v: f64) -> Result<Value, Exc> {
        self.dev.borrow_mut().set_value(v).map_err(|e| gerr(interp, e))?;
        Ok(Value::None)
    }
}

impl NativeObject for OutputObj {
    fn type_name(&self) -> String {
        self.kind.into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let d = self.dev.borrow();
        Some(Ok(match name {
            "value" => Value::Float(d.value()),
            "is_lit" | "is_active" => Value::Bool(d.is_lit()),
            "closed" => Value::Bool(d.closed()),
            _ => return None,
        }))
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, value: Value) -> Result<(), Exc> {
        if name != "value" {
            return Err(interp.error("AttributeError", format!("'{}' object has no attribute '{name}'", self.kind)));
        }
        let v = float_arg(interp, &value, "value")?;
        self.set(interp, v).map(drop)
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "on" | "off" | "toggle" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        Some(match name {
            "on" => self.set(interp, 1.0),
            "off" => self.set(interp, 0.0),
            "toggle" => {
                let v = if self.dev.borrow().is_lit() { 0.0 } else { 1.0 };
                self.set(interp, v)
            }
            "close" => {
                self.dev.borrow_mut().close();
                Ok(Value::None)
            }
            _ => return None,
        })
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(upgrade(&self.me))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.dev.borrow_mut().close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub(crate) struct MotorObj {
    me: Weak<MotorObj>,
    pub dev: RefCell<Motor>,
}

impl MotorObj {
    fn speed(interp: &Interpreter, args: &[Value], kw: &Kwargs) -> Result<f64, Exc> {
        match args.first().or_else(|| kw.iter().find(|(k, _)| k == "speed").map(|(_, v)| v)) {
            Some(v) => float_arg(interp, v, "speed"),
            None => Ok(1.0),
        }
    }
}

impl NativeObject for MotorObj {
    fn type_name(&self) -> String {
        "Motor".into()
    }

    fn get_attr(&self, _interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        let d = self.dev.borrow();
        Some(Ok(match name {
            "value" => Value::Float(d.value()),
            "is_active" => Value::Bool(d.is_active()),
            "closed" => Value::Bool(d.closed()),
            _ => return None,
        }))
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, value: Value) -> Result<(), Exc> {
        if name != "value" {
            return Err(interp.error("AttributeError", format!("'Motor' object has no attribute '{name}'")));
        }
        let v = float_arg(interp, &value, "value")?;
        self.dev.borrow_mut().set_value(v).map_err(|e| gerr(interp, e))
    }

    fn has_method(&self, name: &str) -> bool {
        matches!(name, "forward" | "backward" | "stop" | "reverse" | "close")
    }

    fn call_method(&self, interp: &mut Interpreter, name: &str, args: Vec<Value>, kw: Kwargs) -> Option<Result<Value, Exc>> {
        let mut d = self.dev.borrow_mut();
        let r = match name {
            "forward" => match Self::speed(interp, &args, &kw) {
                Ok(s) => d.forward(s),
                Err(e) => return Some(Err(e)),
            },
            "backward" => match Self::speed(interp, &args, &kw) {
                Ok(s) => d.backward(s),
                Err(e) => return Some(Err(e)),
            },
            "stop" => d.stop(),
            "reverse" => {
                let v = d.value();
                d.set_value(-v)
            }
            "close" => {
                d.close();
                Ok(())
            }
            _ => return None,
        };
        Some(r.map(|_| Value::None).map_err(|e| gerr(interp, e)))
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(upgrade(&self.me))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.dev.borrow_mut().close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Ultrasonic ranger. The measured distance is whatever the test last
/// assigned, clamped to `[0, max_distance]`.
struct DistanceObj {
    me: Weak<DistanceObj>,
    echo: RefCell<InputDevice>,
    trigger: RefCell<OutputDevice>,
    max_distance: f64,
    distance: Cell<f64>,
}

impl NativeObject for DistanceObj {
    fn type_name(&self) -> String {
        "DistanceSensor".into()
    }

    fn get_attr(&self, interp: &mut Interpreter, name: &str) -> Option<Result<Value, Exc>> {
        if self.echo.borrow().closed() && matches!(name, "distance" | "value") {
            return Some(Err(gerr(interp, GpioError::DeviceClosed("DistanceSensor"))));
        }
        Some(Ok(match name {
            "distance" => Value::Float(self.distance.get()),
            "value" => Value::Float(self.distance.get() / self.max_distance),
            "max_distance" => Value::Float(self.max_distance),
            "closed" => Value::Bool(self.echo.borrow().closed()),
            "echo" => self.echo.borrow().pin().map_or(Value::None, |p| Value::native(PinObj(p.clone()))),
            _ => return None,
        }))
    }

    fn set_attr(&self, interp: &mut Interpreter, name: &str, value: Value) -> Result<(), Exc> {
        if name != "distance" {
            return Err(interp.error("AttributeError", format!("'DistanceSensor' object has no attribute '{name}'")));
        }
        let d = float_arg(interp, &value, "distance")?;
        self.distance.set(d.clamp(0.0, self.max_distance));
        Ok(())
    }

    fn has_method(&self, name: &str) -> bool {
        name == "close"
    }

    fn call_method(&self, _i: &mut Interpreter, name: &str, _a: Vec<Value>, _k: Kwargs) -> Option<Result<Value, Exc>> {
        (name == "close").then(|| {
            self.echo.borrow_mut().close();
            self.trigger.borrow_mut().close();
            Ok(Value::None)
        })
    }

    fn enter(&self, _interp: &mut Interpreter) -> Result<Value, Exc> {
        Ok(upgrade(&self.me))
    }

    fn exit(&self, _interp: &mut Interpreter, _exc: Option<&Exc>) -> Result<bool, Exc> {
        self.echo.borrow_mut().close();
        self.trigger.borrow_mut().close();
        Ok(false)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Input device constructor with gpiozero's per-class default pull.
fn input_class(ctx: &Rc<Ctx>, kind: &'static str, default_pull_up: Option<bool>) -> (String, Value) {
    let c = ctx.clone();
    let f = Builtin::value(kind, move |i, args, kw| {
        let s = bind(i, kind, &["pin", "pull_up", "active_state", "pin_factory"], args, kw)?;
        let pin = pin_arg(i, s[0].as_ref())?;
        let pull_up = match &s[1] {
            None => default_pull_up,
            Some(v) => opt_bool(Some(v)),
        };
        let factory = factory_arg(&c, s[3].as_ref());
        Ok(Value::Native(InputObj::create(i, &factory, kind, pin, pull_up, opt_bool(s[2].as_ref()))?))
    });
    (kind.to_string(), f)
}

fn output_class(ctx: &Rc<Ctx>, kind: &'static str, pwm: bool) -> (String, Value) {
    let c = ctx.clone();
    let f = Builtin::value(kind, move |i, args, kw| {
        let s = bind(i, kind, &["pin", "active_high", "initial_value", "frequency", "pin_factory"], args, kw)?;
        let pin = required_pin(i, s[0].as_ref(), kind)?;
        let factory = factory_arg(&c, s[4].as_ref());
        let obj = OutputObj::create(i, &factory, kind, pin, pwm)?;
        if let Some(v) = s[2].as_ref().filter(|v| !v.is_none()) {
            let v = float_arg(i, v, "initial_value")?;
            obj.set(i, v)?;
        }
        Ok(Value::Native(obj))
    });
    (kind.to_string(), f)
}

fn motor_class(ctx: &Rc<Ctx>) -> Value {
    let c = ctx.clone();
    Builtin::value("Motor", move |i, args, kw| {
        let s = bind(i, "Motor", &["forward", "backward", "enable", "pwm", "pin_factory"], args, kw)?;
        let fwd = required_pin(i, s[0].as_ref(), "forward")?;
        let back = required_pin(i, s[1].as_ref(), "backward")?;
        let enable = pin_arg(i, s[2].as_ref())?;
        let factory = factory_arg(&c, s[4].as_ref());
        let dev = Motor::new(&factory, fwd, back, enable).map_err(|e| gerr(i, e))?;
        Ok(Value::Native(Rc::new_cyclic(|me| MotorObj { me: me.clone(), dev: RefCell::new(dev) })))
    })
}

fn distance_class(ctx: &Rc<Ctx>) -> Value {
    let c = ctx.clone();
    Builtin::value("DistanceSensor", move |i, args, kw| {
        let names = ["echo", "trigger", "queue_len", "max_distance", "threshold_distance", "partial", "pin_factory"];
        let s = bind(i, "DistanceSensor", &names, args, kw)?;
        let echo = required_pin(i, s[0].as_ref(), "echo")?;
        let trigger = required_pin(i, s[1].as_ref(), "trigger")?;
        let max_distance = match &s[3] {
            Some(v) => float_arg(i, v, "max_distance")?,
            None => 1.0,
        };
        if max_distance.is_nan() || max_distance <= 0.0 {
            return Err(i.error("ValueError", "invalid maximum distance (must be positive)"));
        }
        let factory = factory_arg(&c, s[6].as_ref());
        let echo = InputDevice::new(&factory, Some(echo), Some(false), None).map_err(|e| gerr(i, e))?;
        let trigger = OutputDevice::new(&factory, trigger, false).map_err(|e| gerr(i, e))?;
        Ok(Value::Native(Rc::new_cyclic(|me| DistanceObj {
            me: me.clone(),
            echo: RefCell::new(echo),
            trigger: RefCell::new(trigger),
            max_distance,
            distance: Cell::new(max_distance),
        })))
    })
}

fn mock_factory_class() -> Value {
    Builtin::value("MockFactory", |i, args, kw| {
        bind(i, "MockFactory", &["revision", "pin_class"], args, kw)?;
        Ok(Value::native(FactoryObj(MockFactory::new())))
    })
}

fn mock_pin_class(ctx: &Rc<Ctx>, name: &'static str) -> Value {
    let c = ctx.clone();
    Builtin::value(name, move |i, args, kw| {
        let s = bind(i, name, &["factory", "info"], args, kw)?;
        let n = required_pin(i, s[1].as_ref().or(s[0].as_ref()), name)?;
        c.factory().pin(n).map(|p| Value::native(PinObj(p))).map_err(|e| gerr(i, e))
    })
}

fn exceptions(interp: &Interpreter) -> Vec<(String, Value)> {
    EXC_NAMES.iter().map(|n| (n.to_string(), Value::ExcClass(interp.exc_class(n)))).collect()
}

pub(crate) fn register(interp: &mut Interpreter, ctx: &Rc<Ctx>) {
    let c = ctx.clone();
    interp.register_module("gpiozero", move |i| {
        let mut attrs = vec![
            ("Device".to_string(), Value::native(DeviceClass(c.clone()))),
            input_class(&c, "InputDevice", Some(false)),
            input_class(&c, "DigitalInputDevice", Some(false)),
            input_class(&c, "Button", Some(true)),
            input_class(&c, "LineSensor", Some(false)),
            input_class(&c, "LightSensor", Some(false)),
            input_class(&c, "MotionSensor", Some(false)),
            output_class(&c, "OutputDevice", false),
            output_class(&c, "DigitalOutputDevice", false),
            output_class(&c, "LED", false),
            output_class(&c, "Buzzer", false),
            output_class(&c, "PWMOutputDevice", true),
            output_class(&c, "PWMLED", true),
            ("Motor".to_string(), motor_class(&c)),
            ("DistanceSensor".to_string(), distance_class(&c)),
        ];
        attrs.extend(exceptions(i));
        Ok(ModuleObj::value("gpiozero", attrs))
    });
    interp.register_module("gpiozero.exc", |i| Ok(ModuleObj::value("gpiozero.exc", exceptions(i))));
    let c = ctx.clone();
    interp.register_module("gpiozero.pins.mock", move |_| {
        Ok(ModuleObj::value(
            "gpiozero.pins.mock",
            vec![
                ("MockFactory".to_string(), mock_factory_class()),
                ("MockPin".to_string(), mock_pin_class(&c, "MockPin")),
                ("MockPWMPin".to_string(), mock_pin_class(&c, "MockPWMPin")),
            ],
        ))
    });
}

#[cfg(test)]
mod tests {
    use crate::analyzer::harness::{run_harness, HarnessOptions};
    use crate::analyzer::OutcomeClass;

    fn run(src: &str) -> (OutcomeClass, String) {
        let r = run_harness(src, &HarnessOptions::new("inputdevice"));
        (r.class, r.message)
    }

    const PREAMBLE: &str = "from hypothesis import given, strategies as st\n\
        from gpiozero import Device, InputDevice, LED, Motor\n\
        from gpiozero.pins.mock import MockFactory, MockPin\n\
        from gpiozero.exc import PinSetInput, PinInvalidState\n";

    #[test]
    fn input_device_pbts_pass() {
        let src = format!(
            "{PREAMBLE}
@given(st.booleans())
def test_close_releases_pin(pull_up):
    Device.pin_factory = MockFactory(pin_class=MockPin)
    device = InputDevice(4, pull_up=pull_up)
    device.close()
    assert device.pin is None

@given(st.booleans())
def test_active_state_affects_is_active_basic(pull_up):
    Device.pin_factory = MockFactory(pin_class=MockPin)
    with InputDevice(4, pull_up=pull_up) as device:
        device.pin.drive_high()
        assert device.is_active == (not pull_up)
        device.pin.drive_low()
        assert device.is_active == pull_up
"
        );
        assert_eq!(run(&src), (OutcomeClass::Pass, String::new()));
    }

    #[test]
    fn interface_misuse_is_a_runtime_exception() {
        let (c, m) = run(&format!("{PREAMBLE}\ndef test_state():\n    d = InputDevice(4)\n    d.pin.state = True\n"));
        assert_eq!(c, OutcomeClass::RuntimeException);
        assert!(m.contains("PinSetInput: cannot set the state of input pin GPIO4"), "{m}");
        let (c, m) = run(&format!("{PREAMBLE}\ndef test_drive():\n    d = InputDevice(4)\n    d.pin.drive_up()\n"));
        assert_eq!(c, OutcomeClass::RuntimeException);
        assert!(m.contains("'MockPin' object has no attribute 'drive_up'"), "{m}");
    }

    #[test]
    fn floating_pin_needs_active_state_and_pins_are_exclusive() {
        let src = format!(
            "{PREAMBLE}
import pytest

def test_floating():
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=None)
    d = InputDevice(4, pull_up=None, active_state=True)
    assert d.pull_up is None

def test_outputs():
    led = LED(17)
    led.on()
    assert led.is_lit and led.value == 1
    m = Motor(2, 3, enable=4, pwm=False)
    m.backward(0.5)
    assert m.value == -0.5
"
        );
        assert_eq!(run(&src), (OutcomeClass::Pass, String::new()));
    }
}
