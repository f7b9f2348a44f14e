//! Mock GPIO pin layer modelled on gpiozero's `MockFactory`/`MockPin` and the
//! devices the subject apps use.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

pub const PIN_COUNT: u8 = 28;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GpioError {
    #[error("{0}")]
    PinInvalidState(String),
    #[error("pin {0} is already in use by another device")]
    PinInUse(u8),
    #[error("{0} is not a valid pin number")]
    InvalidPin(String),
    #[error("cannot set the state of input pin GPIO{0}")]
    SetInput(u8),
    #[error("cannot drive output pin GPIO{0} from outside")]
    DriveOutput(u8),
    #[error("{0} is closed or uninitialized")]
    DeviceClosed(&'static str),
    #[error("{0}")]
    BadValue(String),
}

impl GpioError {
    /// Name of the matching exception class in the Python-facing layer.
    pub fn class_name(&self) -> &'static str {
        match self {
            GpioError::PinInvalidState(_) => "PinInvalidState",
            GpioError::PinInUse(_) => "GPIOPinInUse",
            GpioError::InvalidPin(_) => "PinInvalidPin",
            GpioError::SetInput(_) => "PinSetInput",
            GpioError::DriveOutput(_) => "PinFixedPull",
            GpioError::DeviceClosed(_) => "GPIODeviceClosed",
            GpioError::BadValue(_) => "ValueError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Input,
    Output,
}

impl Function {
    pub fn as_str(self) -> &'static str {
        match self {
            Function::Input => "input",
            Function::Output => "output",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pull {
    Up,
    Down,
    Floating,
}

impl Pull {
    pub fn as_str(self) -> &'static str {
        match self {
            Pull::Up => "up",
            Pull::Down => "down",
            Pull::Floating => "floating",
        }
    }

    pub fn parse(s: &str) -> Option<Pull> {
        match s {
            "up" => Some(Pull::Up),
            "down" => Some(Pull::Down),
            "floating" => Some(Pull::Floating),
            _ => None,
        }
    }
}

#[derive(Debug)]
struct PinState {
    number: u8,
    function: Function,
    pull: Pull,
    high: bool,
    in_use: bool,
}

/// Shared handle to one simulated pin.
#[derive(Clone)]
pub struct MockPin(Rc<RefCell<PinState>>);

impl fmt::Debug for MockPin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MockPin({:?})", self.0.borrow())
    }
}

impl PartialEq for MockPin {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

impl MockPin {
    fn new(number: u8) -> Self {
        MockPin(Rc::new(RefCell::new(PinState {
            number,
            function: Function::Input,
            pull: Pull::Floating,
            high: false,
            in_use: false,
        })))
    }

    pub fn number(&self) -> u8 {
        self.0.borrow().number
    }

    pub fn name(&self) -> String {
        format!("GPIO{}", self.number())
    }

    pub fn function(&self) -> Function {
        self.0.borrow().function
    }

    pub fn set_function(&self, f: Function) {
        let mut s = self.0.borrow_mut();
        s.function = f;
        if f == Function::Output {
            s.pull = Pull::Floating;
        }
    }

    pub fn pull(&self) -> Pull {
        self.0.borrow().pull
    }

    /// Pulling an input pin also settles its level.
    pub fn set_pull(&self, p: Pull) -> Result<(), GpioError> {
        let mut s = self.0.borrow_mut();
        if s.function == Function::Output && p != Pull::Floating {
            return Err(GpioError::PinInvalidState(format!("cannot set pull on output pin GPIO{}", s.number)));
        }
        s.pull = p;
        match p {
            Pull::Up => s.high = true,
            Pull::Down => s.high = false,
            Pull::Floating => {}
        }
        Ok(())
    }

    pub fn is_high(&self) -> bool {
        self.0.borrow().high
    }

    pub fn in_use(&self) -> bool {
        self.0.borrow().in_use
    }

    /// Software write; only output pins accept it.
    pub fn set_state(&self, high: bool) -> Result<(), GpioError> {
        let mut s = self.0.borrow_mut();
        if s.function == Function::Input {
            return Err(GpioError::SetInput(s.number));
        }
        s.high = high;
        Ok(())
    }

    /// External stimulus on an input pin.
    pub fn drive(&self, high: bool) -> Result<(), GpioError> {
        let mut s = self.0.borrow_mut();
        if s.function == Function::Output {
            return Err(GpioError::DriveOutput(s.number));
        }
        s.high = high;
        Ok(())
    }

    pub fn drive_high(&self) -> Result<(), GpioError> {
        self.drive(true)
    }

    pub fn drive_low(&self) -> Result<(), GpioError> {
        self.drive(false)
    }

    fn release(&self) {
        let mut s = self.0.borrow_mut();
        s.in_use = false;
        s.function = Function::Input;
        s.pull = Pull::Floating;
    }
}

/// Hands out pins and tracks which devices hold them.
#[derive(Default)]
pub struct MockFactory {
    pins: RefCell<BTreeMap<u8, MockPin>>,
}

pub type FactoryRef = Rc<MockFactory>;

impl MockFactory {
    pub fn new() -> FactoryRef {
        Rc::new(MockFactory::default())
    }

    pub fn pin(&self, number: i64) -> Result<MockPin, GpioError> {
        let n = u8::try_from(number)
            .ok()
            .filter(|n| *n < PIN_COUNT)
            .ok_or_else(|| GpioError::InvalidPin(number.to_string()))?;
        Ok(self.pins.borrow_mut().entry(n).or_insert_with(|| MockPin::new(n)).clone())
    }

    fn reserve(&self, number: i64) -> Result<MockPin, GpioError> {
        let pin = self.pin(number)?;
        if pin.in_use() {
            return Err(GpioError::PinInUse(pin.number()));
        }
        pin.0.borrow_mut().in_use = true;
        Ok(pin)
    }

    pub fn reset(&self) {
        self.pins.borrow_mut().clear();
    }

    pub fn pins_in_use(&self) -> Vec<u8> {
        self.pins.borrow().values().filter(|p| p.in_use()).map(MockPin::number).collect()
    }
}

/// Generic input device; `is_active` honours the pull direction.
#[derive(Debug)]
pub struct InputDevice {
    pin: Option<MockPin>,
    active_high: bool,
}

impl InputDevice {
    pub fn new(
        factory: &MockFactory,
        pin: Option<i64>,
        pull_up: Option<bool>,
        active_state: Option<bool>,
    ) -> Result<Self, GpioError> {
        let number = pin.ok_or_else(|| GpioError::InvalidPin("None".into()))?;
        let pin = factory.reserve(number)?;
        pin.set_function(Function::Input);
        let pull = match pull_up {
            None => Pull::Floating,
            Some(true) => Pull::Up,
            Some(false) => Pull::Down,
        };
        if pin.pull() != pull {
            pin.set_pull(pull)?;
        }
        let active_high = match (pull_up, active_state) {
            (None, None) => {
                pin.release();
                return Err(GpioError::PinInvalidState(format!(
                    "Pin {} is defined as floating, but \"active_state\" is not defined",
                    pin.name()
                )));
            }
            (None, Some(a)) => a,
            (Some(_), Some(_)) => {
                pin.release();
                return Err(GpioError::PinInvalidState(format!(
                    "Pin {} is not floating, but \"active_state\" is not None",
                    pin.name()
                )));
            }
            (Some(up), None) => !up,
        };
        Ok(InputDevice { pin: Some(pin), active_high })
    }

    pub fn pin(&self) -> Option<&MockPin> {
        self.pin.as_ref()
    }

    fn live_pin(&self) -> Result<&MockPin, GpioError> {
        self.pin.as_ref().ok_or(GpioError::DeviceClosed("InputDevice"))
    }

    pub fn is_active(&self) -> Result<bool, GpioError> {
        Ok(self.live_pin()?.is_high() == self.active_high)
    }

    pub fn value(&self) -> Result<i64, GpioError> {
        self.is_active().map(i64::from)
    }

    pub fn pull_up(&self) -> Result<Option<bool>, GpioError> {
        Ok(match self.live_pin()?.pull() {
            Pull::Floating => None,
            p => Some(p == Pull::Up),
        })
    }

    pub fn active_state(&self) -> bool {
        self.active_high
    }

    pub fn closed(&self) -> bool {
        self.pin.is_none()
    }

    pub fn close(&mut self) {
        if let Some(p) = self.pin.take() {
            p.release();
        }
    }
}

/// Digital or PWM output on one pin.
#[derive(Debug)]
pub struct OutputDevice {
    pin: Option<MockPin>,
    value: f64,
    pwm: bool,
}

impl OutputDevice {
    pub fn new(factory: &MockFactory, pin: i64, pwm: bool) -> Result<Self, GpioError> {
        let pin = factory.reserve(pin)?;
        pin.set_function(Function::Output);
        pin.set_state(false)?;
        Ok(OutputDevice { pin: Some(pin), value: 0.0, pwm })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn set_value(&mut self, v: f64) -> Result<(), GpioError> {
        let pin = self.pin.as_ref().ok_or(GpioError::DeviceClosed("OutputDevice"))?;
        if !(0.0..=1.0).contains(&v) || (!self.pwm && v != 0.0 && v != 1.0) {
            return Err(GpioError::BadValue(format!("invalid output value {v}")));
        }
        pin.set_state(v > 0.0)?;
        self.value = v;
        Ok(())
    }

    pub fn is_lit(&self) -> bool {
        self.value > 0.0
    }

    pub fn closed(&self) -> bool {
        self.pin.is_none()
    }

    pub fn close(&mut self) {
        if let Some(p) = self.pin.take() {
            p.release();
        }
        self.value = 0.0;
    }
}

/// Two-pin bidirectional motor with an optional enable pin.
#[derive(Debug)]
pub struct Motor {
    pins: Vec<MockPin>,
    value: f64,
    closed: bool,
}

impl Motor {
    pub fn new(factory: &MockFactory, forward: i64, backward: i64, enable: Option<i64>) -> Result<Self, GpioError> {
        let mut pins = Vec::new();
        for n in [Some(forward), Some(backward), enable].into_iter().flatten() {
            match factory.reserve(n) {
                Ok(p) => {
                    p.set_function(Function::Output);
                    pins.push(p);
                }
                Err(e) => {
                    pins.iter().for_each(MockPin::release);
                    return Err(e);
                }
            }
        }
        Ok(Motor { pins, value: 0.0, closed: false })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn set_value(&mut self, v: f64) -> Result<(), GpioError> {
        if self.closed {
            return Err(GpioError::DeviceClosed("Motor"));
        }
        if !(-1.0..=1.0).contains(&v) {
            return Err(GpioError::BadValue(format!("motor value must be between -1 and 1, not {v}")));
        }
        self.value = v;
        Ok(())
    }

    pub fn forward(&mut self, speed: f64) -> Result<(), GpioError> {
        check_speed(speed)?;
        self.set_value(speed)
    }

    pub fn backward(&mut self, speed: f64) -> Result<(), GpioError> {
        check_speed(speed)?;
        self.set_value(-speed)
    }

    pub fn stop(&mut self) -> Result<(), GpioError> {
        self.set_value(0.0)
    }

    pub fn is_active(&self) -> bool {
        self.value != 0.0
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn close(&mut self) {
        self.pins.drain(..).for_each(|p| p.release());
        self.value = 0.0;
        self.closed = true;
    }
}

fn check_speed(speed: f64) -> Result<(), GpioError> {
    if (0.0..=1.0).contains(&speed) {
        Ok(())
    } else {
        Err(GpioError::BadValue(format!("speed must be between 0 and 1, not {speed}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev(f: &MockFactory, pull_up: Option<bool>, active: Option<bool>) -> Result<InputDevice, GpioError> {
        InputDevice::new(f, Some(4), pull_up, active)
    }

    #[test]
    fn pull_follows_pull_up() {
        let f = MockFactory::new();
        for (pu, pull) in [(Some(true), Pull::Up), (Some(false), Pull::Down), (None, Pull::Floating)] {
            let mut d = dev(&f, pu, pu.is_none().then_some(true)).unwrap();
            assert_eq!(d.pin().unwrap().pull(), pull);
            assert_eq!(d.pull_up().unwrap(), pu);
            d.close();
        }
    }

    #[test]
    fn pull_up_reverses_activity() {
        let f = MockFactory::new();
        let d = dev(&f, Some(true), None).unwrap();
        assert!(!d.is_active().unwrap(), "pulled-up idle pin reads inactive");
        d.pin().unwrap().drive_high().unwrap();
        assert!(!d.is_active().unwrap());
        d.pin().unwrap().drive_low().unwrap();
        assert!(d.is_active().unwrap());
    }

    #[test]
    fn floating_needs_active_state() {
        let f = MockFactory::new();
        let err = dev(&f, None, None).unwrap_err();
        assert_eq!(err.to_string(), "Pin GPIO4 is defined as floating, but \"active_state\" is not defined");
        assert!(!f.pin(4).unwrap().in_use(), "failed construction releases the pin");
        assert!(matches!(dev(&f, Some(false), Some(true)), Err(GpioError::PinInvalidState(_))));
        let d = dev(&f, None, Some(false)).unwrap();
        d.pin().unwrap().drive_low().unwrap();
        assert!(d.is_active().unwrap());
    }

    #[test]
    fn close_releases_pin() {
        let f = MockFactory::new();
        let mut d = dev(&f, Some(false), None).unwrap();
        let pin = d.pin().unwrap().clone();
        assert!(matches!(dev(&f, Some(false), None), Err(GpioError::PinInUse(4))));
        d.close();
        assert!(d.pin().is_none());
        assert!(!pin.in_use());
        assert!(matches!(d.is_active(), Err(GpioError::DeviceClosed(_))));
        assert!(dev(&f, Some(false), None).is_ok());
    }

    #[test]
    fn invalid_pins_and_directions() {
        let f = MockFactory::new();
        assert!(matches!(f.pin(40), Err(GpioError::InvalidPin(_))));
        assert!(matches!(InputDevice::new(&f, None, Some(false), None), Err(GpioError::InvalidPin(_))));
        let d = dev(&f, Some(false), None).unwrap();
        assert_eq!(d.pin().unwrap().set_state(true), Err(GpioError::SetInput(4)));
        let out = OutputDevice::new(&f, 5, false).unwrap();
        assert_eq!(f.pin(5).unwrap().drive_high(), Err(GpioError::DriveOutput(5)));
        assert!(!out.is_lit());
    }

    #[test]
    fn motor_and_reset() {
        let f = MockFactory::new();
        let mut m = Motor::new(&f, 2, 3, Some(4)).unwrap();
        m.backward(0.5).unwrap();
        assert_eq!(m.value(), -0.5);
        assert!(m.forward(1.5).is_err());
        assert!(matches!(Motor::new(&f, 5, 4, None), Err(GpioError::PinInUse(4))));
        assert!(!f.pin(5).unwrap().in_use(), "partial reservation is rolled back");
        f.reset();
        assert!(f.pins_in_use().is_empty());
    }
}
