//! Temperature control system: sensor, controller and heating/cooling unit
//! sharing one virtual clock, plus the room model.

use num_traits::{Float, FromPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_interval, Action, Command, CorpusError, Periodic, Record, Scalar, Scenario, VirtualClock, TCS_SCHEMA};

pub const TARGET_LOW: f64 = 21.0;
pub const TARGET_HIGH: f64 = 23.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TcsDecision {
    Heat,
    Cool,
    Off,
}

pub fn tcs_decide<F: Float>(temp: F) -> Result<TcsDecision, CorpusError> {
    if !temp.is_finite() {
        return Err(CorpusError::Domain("temperature must be finite".into()));
    }
    Ok(decide(temp))
}

fn decide<F: Float>(temp: F) -> TcsDecision {
    let lo = F::from(TARGET_LOW).unwrap();
    let hi = F::from(TARGET_HIGH).unwrap();
    if temp < lo {
        TcsDecision::Heat
    } else if temp > hi {
        TcsDecision::Cool
    } else {
        TcsDecision::Off
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TcsCommand {
    pub heater_on: bool,
    pub cooler_on: bool,
}

impl From<TcsDecision> for TcsCommand {
    fn from(d: TcsDecision) -> Self {
        match d {
            TcsDecision::Heat => TcsCommand { heater_on: true, cooler_on: false },
            TcsDecision::Cool => TcsCommand { heater_on: false, cooler_on: true },
            TcsDecision::Off => TcsCommand::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcsConfig<F> {
    pub total_time: F,
    pub sensor_interval: F,
    pub control_interval: F,
    pub initial_temp: Option<F>,
    pub seed: u64,
}

impl<F: Float> TcsConfig<F> {
    pub fn with_total(total_time: F) -> Self {
        Self { total_time, sensor_interval: F::one(), control_interval: F::one(), initial_temp: None, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        check_interval("sensor_interval", self.sensor_interval)?;
        check_interval("control_interval", self.control_interval)?;
        if !self.total_time.is_finite() || self.total_time < F::zero() {
            return Err(CorpusError::Config("total_time must be a non-negative finite number".into()));
        }
        // A zero-length run is accepted and yields an empty trace.
        if self.total_time > F::zero() && self.total_time < self.sensor_interval.max(self.control_interval) {
            return Err(CorpusError::Config("total_time must cover at least one sensor and control interval".into()));
        }
        if let Some(t) = self.initial_temp {
            if !t.is_finite() {
                return Err(CorpusError::Config("initial_temp must be finite".into()));
            }
        }
        Ok(())
    }
}

/// One per-tick record. The temperature is read after the tick's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcsState<F> {
    pub temp: F,
    pub heater_value: F,
    pub cooler_value: F,
    pub outside_air_temp: F,
    pub tick: u64,
}

impl<F: Float> TcsState<F> {
    pub fn record(&self) -> Record {
        let f = |v: F| Scalar::Float(v.to_f64().unwrap_or(f64::NAN));
        Record {
            fields: vec![
                ("temp", f(self.temp)),
                ("heater_value", f(self.heater_value)),
                ("cooler_value", f(self.cooler_value)),
                ("outside_air_temp", f(self.outside_air_temp)),
                ("tick", Scalar::Int(self.tick as i64)),
            ],
        }
    }
}

/// A trace entry together with the sensed temperature the controller last acted on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcsStep<F> {
    pub state: TcsState<F>,
    pub decided_on: Option<F>,
}

pub struct TcsSim<F> {
    clock: VirtualClock<F>,
    rng: ChaCha8Rng,
    sensor: Periodic<F>,
    controller: Periodic<F>,
    plant: Periodic<F>,
    room_temp: F,
    sensed: F,
    command: TcsCommand,
    decided_on: Option<F>,
    outside: F,
    tick: u64,
}

impl<F: Float + FromPrimitive> TcsSim<F> {
    pub fn new(cfg: TcsConfig<F>) -> Result<Self, CorpusError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let room_temp = match cfg.initial_temp {
            Some(t) => t,
            None => F::from_i32(rng.gen_range(20..=24)).unwrap(),
        };
        let mut clock = VirtualClock::new();
        // Registration order doubles as the tie-break order.
        let sensor = Periodic::new(&mut clock, cfg.sensor_interval, cfg.total_time)?;
        let controller = Periodic::new(&mut clock, cfg.control_interval, cfg.total_time)?;
        let plant = Periodic::new(&mut clock, F::one(), cfg.total_time)?;
        Ok(Self {
            clock,
            rng,
            sensor,
            controller,
            plant,
            room_temp,
            sensed: room_temp,
            command: TcsCommand::default(),
            decided_on: None,
            outside: F::zero(),
            tick: 0,
        })
    }

    pub fn room_temp(&self) -> F {
        self.room_temp
    }

    pub fn decided_on(&self) -> Option<F> {
        self.decided_on
    }

    fn step(&mut self) -> Option<TcsCommand> {
        while let Some((_, id)) = self.clock.pop() {
            if id == self.sensor.id {
                self.sensed = self.room_temp;
                self.sensor.fire(&mut self.clock).expect("periodic schedule moves forward");
            } else if id == self.controller.id {
                self.command = decide(self.sensed).into();
                self.decided_on = Some(self.sensed);
                self.controller.fire(&mut self.clock).expect("periodic schedule moves forward");
            } else {
                self.outside = F::from_i32(self.rng.gen_range(-1..=1)).unwrap();
                self.plant.fire(&mut self.clock).expect("periodic schedule moves forward");
                return Some(self.command);
            }
        }
        None
    }

    fn predict(&self, cmd: TcsCommand) -> TcsState<F> {
        let h = if cmd.heater_on { F::one() } else { F::zero() };
        let c = if cmd.cooler_on { F::one() } else { F::zero() };
        TcsState {
            temp: self.room_temp + self.outside + h - c,
            heater_value: h,
            cooler_value: c,
            outside_air_temp: self.outside,
            tick: self.tick,
        }
    }

    fn apply(&mut self, cmd: TcsCommand) -> TcsState<F> {
        let s = self.predict(cmd);
        self.room_temp = s.temp;
        self.tick += 1;
        s
    }

    pub fn run_detailed(mut self) -> Vec<TcsStep<F>> {
        let mut out = Vec::new();
        while let Some(cmd) = self.step() {
            let state = self.apply(cmd);
            out.push(TcsStep { state, decided_on: self.decided_on });
        }
        out
    }
}

pub fn tcs_execute_scenario<F: Float + FromPrimitive>(cfg: TcsConfig<F>) -> Result<Vec<TcsState<F>>, CorpusError> {
    Ok(TcsSim::new(cfg)?.run_detailed().into_iter().map(|s| s.state).collect())
}

fn tcs_cmd(cmd: &Command) -> TcsCommand {
    match cmd.action {
        Action::Tcs(c) => c,
        Action::Pcs(_) => panic!("PCS command sent to the TCS plant"),
    }
}

impl<F: Float + FromPrimitive> Scenario for TcsSim<F> {
    fn subject(&self) -> &'static str {
        "tcs"
    }

    fn schema(&self) -> &'static [&'static str] {
        TCS_SCHEMA
    }

    fn next_tick(&mut self) -> Option<Command> {
        self.step().map(|c| Command::new(Action::Tcs(c)))
    }

    fn preview(&self, cmd: &Command) -> Record {
        let mut rec = self.predict(tcs_cmd(cmd)).record();
        cmd.apply_forced(&mut rec);
        rec
    }

    fn commit(&mut self, cmd: &Command) -> Record {
        let mut rec = self.apply(tcs_cmd(cmd)).record();
        cmd.apply_forced(&mut rec);
        rec
    }

    /// Falls back to the decision table on the true room temperature,
    /// bypassing whatever the controller proposed.
    fn safe_command(&self) -> Command {
        Command::new(Action::Tcs(decide(self.room_temp).into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_table() {
        assert_eq!(tcs_decide(22.0).unwrap(), TcsDecision::Off);
        assert_eq!(tcs_decide(20.0).unwrap(), TcsDecision::Heat);
        assert_eq!(tcs_decide(24.0).unwrap(), TcsDecision::Cool);
        assert_eq!(tcs_decide(21.0).unwrap(), TcsDecision::Off);
        assert_eq!(tcs_decide(23.0).unwrap(), TcsDecision::Off);
        assert!(matches!(tcs_decide(f64::NAN), Err(CorpusError::Domain(_))));
        assert!(matches!(tcs_decide(f32::INFINITY), Err(CorpusError::Domain(_))));
    }

    /// Independent re-simulation with unit intervals: sensor, controller and
    /// room all act once per second in that order.
    fn oracle(initial: f64, outside: &[f64]) -> Vec<f64> {
        let mut temp = initial;
        outside
            .iter()
            .map(|o| {
                let (h, c) = if temp < 21.0 {
                    (1.0, 0.0)
                } else if temp > 23.0 {
                    (0.0, 1.0)
                } else {
                    (0.0, 0.0)
                };
                temp += o + h - c;
                temp
            })
            .collect()
    }

    #[test]
    fn ten_tick_scenario_matches_oracle() {
        let cfg = TcsConfig { initial_temp: Some(22.0), seed: 7, ..TcsConfig::with_total(10.0) };
        let trace = tcs_execute_scenario(cfg).unwrap();
        assert_eq!(trace.len(), 10);
        let outside: Vec<f64> = trace.iter().map(|s| s.outside_air_temp).collect();
        let temps: Vec<f64> = trace.iter().map(|s| s.temp).collect();
        assert_eq!(temps, oracle(22.0, &outside));
        assert!(temps.iter().all(|t| (20.0..=24.0).contains(t)));
        assert!(trace.iter().enumerate().all(|(i, s)| s.tick == i as u64));
    }

    #[test]
    fn zero_length_and_determinism() {
        assert!(tcs_execute_scenario(TcsConfig::<f64>::with_total(0.0)).unwrap().is_empty());
        let cfg = TcsConfig { seed: 3, ..TcsConfig::with_total(30.0) };
        assert_eq!(tcs_execute_scenario(cfg.clone()).unwrap(), tcs_execute_scenario(cfg).unwrap());
    }

    #[test]
    fn runs_on_f32() {
        let cfg = TcsConfig { initial_temp: Some(22.0f32), seed: 7, ..TcsConfig::with_total(10.0f32) };
        let a = tcs_execute_scenario(cfg).unwrap();
        let b = tcs_execute_scenario(TcsConfig { initial_temp: Some(22.0f64), seed: 7, ..TcsConfig::with_total(10.0) }).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| f64::from(x.temp) == y.temp));
    }

    #[test]
    fn config_errors() {
        let bad = TcsConfig { sensor_interval: 0.0, ..TcsConfig::with_total(5.0) };
        assert!(matches!(tcs_execute_scenario(bad), Err(CorpusError::Config(_))));
        let short = TcsConfig { control_interval: 4.0, ..TcsConfig::with_total(2.0) };
        assert!(matches!(tcs_execute_scenario(short), Err(CorpusError::Config(_))));
    }

    #[test]
    fn slower_components_act_on_stale_readings() {
        let cfg = TcsConfig { sensor_interval: 3.0, control_interval: 2.0, initial_temp: Some(20.0), seed: 1, ..TcsConfig::with_total(12.0) };
        let steps = TcsSim::new(cfg).unwrap().run_detailed();
        assert_eq!(steps.len(), 12);
        for s in &steps {
            let d = decide(s.decided_on.unwrap());
            assert_eq!(s.state.heater_value > 0.0, d == TcsDecision::Heat);
            assert_eq!(s.state.cooler_value > 0.0, d == TcsDecision::Cool);
        }
    }
}
