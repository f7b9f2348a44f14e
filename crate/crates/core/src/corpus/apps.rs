//! The small pin-based apps: laser tripwire, line-following robot, ultrasonic
//! theremin and presence indicator.

use super::gpio::{GpioError, InputDevice, Motor, MockFactory, OutputDevice};
use super::CorpusError;

pub const TRIPWIRE_THRESHOLD: f64 = 0.5;
pub const THEREMIN_MAX_RANGE: f64 = 2.0;
pub const PRESENCE_LEDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripwireState {
    pub light_present: bool,
    pub intruder_printed: bool,
}

pub fn tripwire_step(light_present: bool) -> TripwireState {
    TripwireState { light_present, intruder_printed: !light_present }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub left_sensor: bool,
    pub right_sensor: bool,
    pub left_motor: f64,
    pub right_motor: f64,
}

/// Motor values for one sensor reading. With both sensors on the line the
/// previous motor values are kept.
pub fn robot_step(prev: (f64, f64), left: bool, right: bool, speed: f64) -> Result<RobotState, CorpusError> {
    if !(0.0..=1.0).contains(&speed) {
        return Err(CorpusError::Domain(format!("speed {speed} outside [0, 1]")));
    }
    let (left_motor, right_motor) = match (left, right) {
        (true, false) => (-speed, speed),
        (false, true) => (speed, -speed),
        (false, false) => (speed, speed),
        (true, true) => prev,
    };
    Ok(RobotState { left_sensor: left, right_sensor: right, left_motor, right_motor })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThereminState {
    pub distance: f64,
    pub volume: f64,
}

pub fn theremin_volume(distance: f64, max_range: f64) -> Result<f64, CorpusError> {
    if distance.is_nan() || distance < 0.0 {
        return Err(CorpusError::Domain(format!("distance must be non-negative, got {distance}")));
    }
    Ok((1.0 - distance / max_range).clamp(0.0, 1.0))
}

pub fn theremin_step(distance: f64) -> Result<ThereminState, CorpusError> {
    Ok(ThereminState { distance, volume: theremin_volume(distance, THEREMIN_MAX_RANGE)? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresenceState {
    pub present_count: i64,
    pub lit_leds: usize,
}

pub fn presence_lit(count: i64, led_count: usize) -> Result<usize, CorpusError> {
    if count < 0 {
        return Err(CorpusError::Domain(format!("present count must be non-negative, got {count}")));
    }
    Ok(usize::try_from(count / 10).unwrap_or(usize::MAX).min(led_count))
}

pub fn presence_step(count: i64) -> Result<PresenceState, CorpusError> {
    Ok(PresenceState { present_count: count, lit_leds: presence_lit(count, PRESENCE_LEDS)? })
}

/// Pin-backed laser tripwire. The light-dependent resistor reads 1.0 when the
/// beam hits it and 0.0 otherwise.
#[derive(Debug)]
pub struct LaserTripwire {
    pub ldr: InputDevice,
    pub threshold: f64,
    pub intruder: bool,
}

impl LaserTripwire {
    pub fn new(factory: &MockFactory, ldr_pin: i64, threshold: f64) -> Result<Self, GpioError> {
        Ok(Self { ldr: InputDevice::new(factory, Some(ldr_pin), Some(false), None)?, threshold, intruder: false })
    }

    pub fn light_level(&self) -> Result<f64, GpioError> {
        Ok(if self.ldr.is_active()? { 1.0 } else { 0.0 })
    }

    /// Returns true when the beam is broken. `level` overrides the sensor.
    pub fn check(&mut self, level: Option<f64>) -> Result<bool, GpioError> {
        let level = match level {
            Some(l) if !(0.0..=1.0).contains(&l) => {
                return Err(GpioError::BadValue(format!("light level must be between 0 and 1, not {l}")))
            }
            Some(l) => l,
            None => self.light_level()?,
        };
        self.intruder = level < self.threshold;
        Ok(self.intruder)
    }

    pub fn close(&mut self) {
        self.ldr.close();
    }
}

#[derive(Debug)]
pub struct LineFollowingRobot {
    pub left_sensor: InputDevice,
    pub right_sensor: InputDevice,
    pub speed: f64,
}

impl LineFollowingRobot {
    pub fn new(factory: &MockFactory, left_pin: i64, right_pin: i64, speed: f64) -> Result<Self, GpioError> {
        if !(0.0..=1.0).contains(&speed) {
            return Err(GpioError::BadValue(format!("speed must be between 0 and 1, not {speed}")));
        }
        let left_sensor = InputDevice::new(factory, Some(left_pin), Some(false), None)?;
        let right_sensor = match InputDevice::new(factory, Some(right_pin), Some(false), None) {
            Ok(d) => d,
            Err(e) => {
                let mut l = left_sensor;
                l.close();
                return Err(e);
            }
        };
        Ok(Self { left_sensor, right_sensor, speed })
    }

    /// Reads both sensors and drives the motors.
    pub fn update(&self, left_motor: &mut Motor, right_motor: &mut Motor) -> Result<RobotState, GpioError> {
        let (l, r) = (self.left_sensor.is_active()?, self.right_sensor.is_active()?);
        let s = robot_step((left_motor.value(), right_motor.value()), l, r, self.speed)
            .map_err(|e| GpioError::BadValue(e.to_string()))?;
        left_motor.set_value(s.left_motor)?;
        right_motor.set_value(s.right_motor)?;
        Ok(s)
    }

    pub fn close(&mut self) {
        self.left_sensor.close();
        self.right_sensor.close();
    }
}

#[derive(Debug)]
pub struct UltrasonicTheremin {
    pub echo: InputDevice,
    pub trigger: OutputDevice,
    pub buzzer: OutputDevice,
    pub max_range: f64,
}

impl UltrasonicTheremin {
    pub fn new(factory: &MockFactory, echo: i64, trigger: i64, buzzer: i64, max_range: f64) -> Result<Self, GpioError> {
        if !(max_range > 0.0 && max_range.is_finite()) {
            return Err(GpioError::BadValue(format!("max_range must be positive, not {max_range}")));
        }
        let echo = InputDevice::new(factory, Some(echo), Some(false), None)?;
        let trigger = OutputDevice::new(factory, trigger, false)?;
        let buzzer = OutputDevice::new(factory, buzzer, true)?;
        Ok(Self { echo, trigger, buzzer, max_range })
    }

    pub fn update(&mut self, distance: f64) -> Result<f64, GpioError> {
        let v = theremin_volume(distance, self.max_range).map_err(|e| GpioError::BadValue(e.to_string()))?;
        self.buzzer.set_value(v)?;
        Ok(v)
    }

    pub fn volume(&self) -> f64 {
        self.buzzer.value()
    }

    pub fn close(&mut self) {
        self.echo.close();
        self.trigger.close();
        self.buzzer.close();
    }
}

#[derive(Debug)]
pub struct PresenceIndicator {
    pub leds: Vec<OutputDevice>,
    pub count: i64,
}

impl PresenceIndicator {
    pub fn new(factory: &MockFactory, pins: &[i64]) -> Result<Self, GpioError> {
        let mut leds: Vec<OutputDevice> = Vec::new();
        for &p in pins {
            match OutputDevice::new(factory, p, false) {
                Ok(l) => leds.push(l),
                Err(e) => {
                    leds.iter_mut().for_each(OutputDevice::close);
                    return Err(e);
                }
            }
        }
        Ok(Self { leds, count: 0 })
    }

    pub fn update(&mut self, count: i64) -> Result<usize, GpioError> {
        let lit = presence_lit(count, self.leds.len()).map_err(|e| GpioError::BadValue(e.to_string()))?;
        for (i, led) in self.leds.iter_mut().enumerate() {
            led.set_value(if i < lit { 1.0 } else { 0.0 })?;
        }
        self.count = count;
        Ok(lit)
    }

    pub fn lit_leds(&self) -> usize {
        self.leds.iter().filter(|l| l.is_lit()).count()
    }

    pub fn close(&mut self) {
        self.leds.iter_mut().for_each(OutputDevice::close);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripwire_prints_iff_dark() {
        assert!(!tripwire_step(true).intruder_printed);
        assert!(tripwire_step(false).intruder_printed);
        let f = MockFactory::new();
        let mut t = LaserTripwire::new(&f, 4, TRIPWIRE_THRESHOLD).unwrap();
        assert!(t.check(None).unwrap());
        t.ldr.pin().unwrap().drive_high().unwrap();
        assert!(!t.check(None).unwrap());
        assert!(t.check(Some(0.49)).unwrap());
        assert!(!t.check(Some(0.5)).unwrap());
        assert!(t.check(Some(1.5)).is_err());
    }

    #[test]
    fn robot_turns() {
        let s = robot_step((0.0, 0.0), true, false, 0.5).unwrap();
        assert_eq!((s.left_motor, s.right_motor), (-0.5, 0.5));
        let s = robot_step((0.0, 0.0), false, true, 0.5).unwrap();
        assert_eq!((s.left_motor, s.right_motor), (0.5, -0.5));
        let s = robot_step((0.0, 0.0), false, false, 0.3).unwrap();
        assert_eq!((s.left_motor, s.right_motor), (0.3, 0.3));
        let s = robot_step((0.3, -0.3), true, true, 0.3).unwrap();
        assert_eq!((s.left_motor, s.right_motor), (0.3, -0.3));
    }

    #[test]
    fn robot_on_pins() {
        let f = MockFactory::new();
        let mut lm = Motor::new(&f, 2, 3, Some(4)).unwrap();
        let mut rm = Motor::new(&f, 5, 6, Some(7)).unwrap();
        let r = LineFollowingRobot::new(&f, 17, 27, 0.5).unwrap();
        r.left_sensor.pin().unwrap().drive_high().unwrap();
        r.update(&mut lm, &mut rm).unwrap();
        assert_eq!((lm.value(), rm.value()), (-0.5, 0.5));
    }

    #[test]
    fn theremin_law() {
        assert_eq!(theremin_step(0.0).unwrap().volume, 1.0);
        assert_eq!(theremin_step(1.0).unwrap().volume, 0.5);
        assert_eq!(theremin_step(5.0).unwrap().volume, 0.0);
        assert!(theremin_step(-0.1).is_err());
        let f = MockFactory::new();
        let mut t = UltrasonicTheremin::new(&f, 17, 4, 18, 2.0).unwrap();
        assert_eq!(t.update(0.5).unwrap(), 0.75);
        assert_eq!(t.volume(), 0.75);
    }

    #[test]
    fn presence_display() {
        assert_eq!(presence_step(0).unwrap().lit_leds, 0);
        assert_eq!(presence_step(9).unwrap().lit_leds, 0);
        assert_eq!(presence_step(10).unwrap().lit_leds, 1);
        assert_eq!(presence_step(35).unwrap().lit_leds, 3);
        assert_eq!(presence_step(1000).unwrap().lit_leds, 4);
        assert!(presence_step(-1).is_err());
        let f = MockFactory::new();
        let mut p = PresenceIndicator::new(&f, &[5, 6, 13, 19]).unwrap();
        p.update(27).unwrap();
        assert_eq!(p.lit_leds(), 2);
        p.close();
        assert_eq!(p.lit_leds(), 0);
    }
}
