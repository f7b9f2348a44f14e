//! Fault descriptors and the scenario wrapper that applies them.
//!
//! Grammar, `;`-separated:
//!
//! ```text
//! force:<field>=<value>@<tick>    the command proposed at <tick> drives <field> to <value>
//! disable:<actuator>              the controller's commands to <actuator> never arrive
//! ```
//!
//! Actuators are `heater`, `cooler` (TCS) and `cylinder_a`, `cylinder_b` (PCS).
//! Faults act on what the controller proposes; a monitor's safe command
//! bypasses them.

use std::str::FromStr;

use super::{schema_of, Action, Command, CorpusError, Motion, Record, Scalar, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub enum Fault {
    Force { field: String, value: Scalar, tick: u64 },
    Disable(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaultSpec(pub Vec<Fault>);

impl FaultSpec {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn parse_scalar(s: &str) -> Option<Scalar> {
    match s {
        "true" | "True" => Some(Scalar::Bool(true)),
        "false" | "False" => Some(Scalar::Bool(false)),
        _ => s.parse::<i64>().map(Scalar::Int).ok().or_else(|| s.parse::<f64>().ok().map(Scalar::Float)),
    }
}

impl FromStr for FaultSpec {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::BadFault(s.to_string());
        let mut faults = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (kind, rest) = part.split_once(':').ok_or_else(bad)?;
            match kind.trim() {
                "force" => {
                    let (assign, tick) = rest.split_once('@').ok_or_else(bad)?;
                    let (field, value) = assign.split_once('=').ok_or_else(bad)?;
                    faults.push(Fault::Force {
                        field: field.trim().to_string(),
                        value: parse_scalar(value.trim()).ok_or_else(bad)?,
                        tick: tick.trim().parse().map_err(|_| bad())?,
                    });
                }
                "disable" => faults.push(Fault::Disable(rest.trim().to_string())),
                _ => return Err(bad()),
            }
        }
        Ok(FaultSpec(faults))
    }
}

const TCS_ACTUATORS: &[&str] = &["heater", "cooler"];
const PCS_ACTUATORS: &[&str] = &["cylinder_a", "cylinder_b"];

/// Checks every fault against the subject before any tick runs.
pub fn validate(subject: &str, spec: &FaultSpec) -> Result<(), CorpusError> {
    let schema = schema_of(subject)?;
    let actuators = if subject == "tcs" { TCS_ACTUATORS } else { PCS_ACTUATORS };
    for f in &spec.0 {
        let name = match f {
            Fault::Force { field, .. } if field == "tick" || !schema.contains(&field.as_str()) => field,
            Fault::Disable(a) if !actuators.contains(&a.as_str()) => a,
            _ => continue,
        };
        return Err(CorpusError::UnknownField { subject: subject.to_string(), field: name.clone() });
    }
    Ok(())
}

pub struct Faulted {
    inner: Box<dyn Scenario>,
    spec: FaultSpec,
    tick: u64,
}

/// Wraps `inner` so that its controller misbehaves as described by `spec`.
pub fn inject_fault(inner: Box<dyn Scenario>, spec: FaultSpec) -> Result<Box<dyn Scenario>, CorpusError> {
    validate(inner.subject(), &spec)?;
    if spec.is_empty() {
        return Ok(inner);
    }
    Ok(Box::new(Faulted { inner, spec, tick: 0 }))
}

impl Scenario for Faulted {
    fn subject(&self) -> &'static str {
        self.inner.subject()
    }

    fn schema(&self) -> &'static [&'static str] {
        self.inner.schema()
    }

    fn next_tick(&mut self) -> Option<Command> {
        let mut cmd = self.inner.next_tick()?;
        for f in &self.spec.0 {
            match (f, &mut cmd.action) {
                (Fault::Force { field, value, tick }, _) if *tick == self.tick => {
                    cmd.forced.push((field.clone(), *value));
                }
                (Fault::Disable(a), Action::Tcs(c)) if a == "heater" => c.heater_on = false,
                (Fault::Disable(a), Action::Tcs(c)) if a == "cooler" => c.cooler_on = false,
                (Fault::Disable(a), Action::Pcs(c)) if a == "cylinder_a" => c.a = Motion::Stop,
                (Fault::Disable(a), Action::Pcs(c)) if a == "cylinder_b" => c.b = Motion::Stop,
                _ => {}
            }
        }
        self.tick += 1;
        Some(cmd)
    }

    fn preview(&self, cmd: &Command) -> Record {
        self.inner.preview(cmd)
    }

    fn commit(&mut self, cmd: &Command) -> Record {
        self.inner.commit(cmd)
    }

    fn safe_command(&self) -> Command {
        self.inner.safe_command()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{run_unmonitored, scenario_for, TcsConfig, TcsSim};

    #[test]
    fn parses_descriptors() {
        let spec: FaultSpec = "force:cylinder_a_loc=2.5@5; disable:cooler".parse().unwrap();
        assert_eq!(
            spec.0,
            vec![
                Fault::Force { field: "cylinder_a_loc".into(), value: Scalar::Float(2.5), tick: 5 },
                Fault::Disable("cooler".into())
            ]
        );
        assert!("".parse::<FaultSpec>().unwrap().is_empty());
        assert!("force:x@1".parse::<FaultSpec>().is_err());
        assert!("melt:everything".parse::<FaultSpec>().is_err());
    }

    #[test]
    fn unknown_fields_are_lookup_errors() {
        let sc = scenario_for("pcs", 10, 0).unwrap();
        let err = inject_fault(sc, "force:temp=30@1".parse().unwrap()).err().unwrap();
        assert!(matches!(err, CorpusError::UnknownField { .. }));
        let sc = scenario_for("tcs", 10, 0).unwrap();
        assert!(inject_fault(sc, "disable:cylinder_a".parse().unwrap()).is_err());
        assert!(matches!(scenario_for("buggy", 1, 0), Err(CorpusError::UnknownSubject(_))));
    }

    #[test]
    fn forced_location_shows_at_its_tick_only() {
        let mut sc = inject_fault(scenario_for("pcs", 40, 0).unwrap(), "force:cylinder_a_loc=2.5@5".parse().unwrap()).unwrap();
        let trace = run_unmonitored(sc.as_mut());
        let out: Vec<i64> = trace
            .iter()
            .filter(|r| !(0.0..=2.0).contains(&r.get("cylinder_a_loc").unwrap().as_f64()))
            .map(|r| r.get("tick").unwrap().as_f64() as i64)
            .collect();
        assert_eq!(out, vec![5]);
    }

    #[test]
    fn empty_fault_is_identity() {
        let healthy = run_unmonitored(scenario_for("tcs", 30, 4).unwrap().as_mut());
        let mut sc = inject_fault(scenario_for("tcs", 30, 4).unwrap(), FaultSpec::default()).unwrap();
        assert_eq!(run_unmonitored(sc.as_mut()), healthy);
    }

    #[test]
    fn disabled_cooler_overheats() {
        // Re-simulate with the cooler pinned off and compare.
        let cfg = TcsConfig { initial_temp: Some(24.0), seed: 11, ..TcsConfig::with_total(30.0) };
        let mut sc = inject_fault(Box::new(TcsSim::new(cfg).unwrap()), "disable:cooler".parse().unwrap()).unwrap();
        let trace = run_unmonitored(sc.as_mut());
        let mut temp = 24.0;
        for r in &trace {
            assert_eq!(r.get("cooler_value"), Some(Scalar::Float(0.0)));
            let heat = if temp < 21.0 { 1.0 } else { 0.0 };
            temp += r.get("outside_air_temp").unwrap().as_f64() + heat;
            assert_eq!(r.get("temp").unwrap().as_f64(), temp);
        }
        assert!(trace.iter().any(|r| r.get("temp").unwrap().as_f64() > 24.0));
    }
}
