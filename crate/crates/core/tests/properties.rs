use chekprop::corpus::apps::{presence_lit, robot_step, theremin_volume, PRESENCE_LEDS, THEREMIN_MAX_RANGE};
use chekprop::corpus::gpio::{InputDevice, MockFactory};
use chekprop::corpus::{run_unmonitored, scenario_for, tcs_decide, PcsConfig, TcsConfig, TcsDecision, VirtualClock};
use chekprop::evalkit::{compute_relevance, effectiveness_level, Group, Level, MappingTable, PropertyRecord};
use chekprop::guardrail::{Bound, Constraint, GuardChecker, GuardSpec};
use chekprop::llmclient::{conversation_digest, extract_test_sources};
use chekprop::promptkit::{Conversation, Message, Role};
use chekprop::{Pcs, Tcs};
use proptest::prelude::*;

proptest! {
    #[test]
    fn decide_partitions_the_line(t in -1e6f64..1e6) {
        let want = if t < 21.0 { TcsDecision::Heat } else if t > 23.0 { TcsDecision::Cool } else { TcsDecision::Off };
        prop_assert_eq!(tcs_decide(t).unwrap(), want);
    }

    #[test]
    fn tcs_actuation_follows_decision(
        total in 1u32..60,
        sensor in 1u32..4,
        control in 1u32..4,
        init in 10i32..35,
        seed in any::<u64>(),
    ) {
        prop_assume!(total >= sensor.max(control));
        let cfg = TcsConfig {
            total_time: f64::from(total),
            sensor_interval: f64::from(sensor),
            control_interval: f64::from(control),
            initial_temp: Some(f64::from(init)),
            seed,
        };
        let steps = Tcs::new(cfg.clone()).unwrap().run_detailed();
        prop_assert_eq!(&steps, &Tcs::new(cfg).unwrap().run_detailed());
        for s in steps {
            let (h, c) = (s.state.heater_value > 0.0, s.state.cooler_value > 0.0);
            match s.decided_on {
                Some(t) => prop_assert_eq!((h, c), (t < 21.0, t > 23.0)),
                None => prop_assert!(!h && !c),
            }
            prop_assert!((-1.0..=1.0).contains(&s.state.outside_air_temp));
        }
    }

    #[test]
    fn pcs_states_stay_safe(
        total in 0.0f64..60.0,
        cyl in 0.05f64..3.0,
        ctl in 0.05f64..3.0,
        mock in 0.05f64..3.0,
        seed in any::<u64>(),
    ) {
        let cfg = PcsConfig { total_time: total, cylinder_interval: cyl, controller_interval: ctl, mock_interval: mock, seed };
        let states = Pcs::new(cfg.clone()).unwrap().run();
        prop_assert_eq!(&states, &Pcs::new(cfg).unwrap().run());
        let (mut a, mut b) = (0.0f64, 0.0f64);
        for s in states {
            prop_assert!((0.0..=2.0).contains(&s.cylinder_a_loc));
            prop_assert!((0.0..=2.0).contains(&s.cylinder_b_location));
            prop_assert!(!(s.a_moving && s.b_moving));
            prop_assert!(!s.a_moving || s.cylinder_b_location == 0.0);
            prop_assert!((s.cylinder_a_loc - a).abs() <= cyl + 1e-12);
            prop_assert!((s.cylinder_b_location - b).abs() <= cyl + 1e-12);
            (a, b) = (s.cylinder_a_loc, s.cylinder_b_location);
        }
    }

    #[test]
    fn scenarios_replay_identically(ticks in 1u32..60, seed in any::<u64>(), pcs in any::<bool>()) {
        let subject = if pcs { "pcs" } else { "tcs" };
        let a = run_unmonitored(scenario_for(subject, ticks, seed).unwrap().as_mut());
        let b = run_unmonitored(scenario_for(subject, ticks, seed).unwrap().as_mut());
        prop_assert_eq!(a.len(), ticks as usize);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn clock_fires_in_time_then_registration_order(dues in prop::collection::vec((0u32..20, 0usize..4), 1..40)) {
        let mut clock = VirtualClock::<f64>::new();
        let ids: Vec<_> = (0..4).map(|_| clock.register()).collect();
        for (t, i) in &dues {
            clock.schedule(f64::from(*t), ids[*i]).unwrap();
        }
        let mut fired = Vec::new();
        while let Some((t, id)) = clock.pop() {
            prop_assert_eq!(*clock.now(), t);
            fired.push((t as u32, id.0));
        }
        let mut want: Vec<_> = dues.iter().map(|(t, i)| (*t, ids[*i].0)).collect();
        want.sort();
        prop_assert_eq!(fired, want);
    }

    #[test]
    fn input_device_polarity(pull_up in any::<bool>(), pin in 2i64..27) {
        let factory = MockFactory::new();
        let mut d = InputDevice::new(&factory, Some(pin), Some(pull_up), None).unwrap();
        d.pin().unwrap().drive_high().unwrap();
        prop_assert_eq!(d.is_active().unwrap(), !pull_up);
        d.pin().unwrap().drive_low().unwrap();
        prop_assert_eq!(d.is_active().unwrap(), pull_up);
        d.close();
        prop_assert!(factory.pins_in_use().is_empty());
    }

    #[test]
    fn theremin_is_monotone(d1 in 0.0f64..5.0, d2 in 0.0f64..5.0) {
        let (v1, v2) = (theremin_volume(d1, THEREMIN_MAX_RANGE).unwrap(), theremin_volume(d2, THEREMIN_MAX_RANGE).unwrap());
        prop_assert!((0.0..=1.0).contains(&v1));
        if d1 < d2 {
            prop_assert!(v1 >= v2);
        }
    }

    #[test]
    fn presence_shows_tens(count in 0i64..10_000) {
        let lit = presence_lit(count, PRESENCE_LEDS).unwrap();
        prop_assert_eq!(lit, ((count / 10) as usize).min(PRESENCE_LEDS));
        prop_assert!(count < 10 || lit >= 1);
    }

    #[test]
    fn robot_turns_toward_the_line(left in any::<bool>(), right in any::<bool>(), speed in 0.0f64..=1.0) {
        let s = robot_step((0.3, -0.3), left, right, speed).unwrap();
        let want = match (left, right) {
            (true, false) => (-speed, speed),
            (false, true) => (speed, -speed),
            (false, false) => (speed, speed),
            (true, true) => (0.3, -0.3),
        };
        prop_assert_eq!((s.left_motor, s.right_motor), want);
    }

    #[test]
    fn relevance_matches_counts(groups in prop::collection::vec(0u8..4, 1..60)) {
        let records: Vec<_> = groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let group = [Group::ExactMatch, Group::EquivalentMatch, Group::ExtractedOnly, Group::GroundtruthOnly][*g as usize];
                let (gt, ex) = match group {
                    Group::ExtractedOnly => ("", "x"),
                    Group::GroundtruthOnly => ("g", ""),
                    _ => ("g", "x"),
                };
                PropertyRecord {
                    property_id: format!("Pr{i}"),
                    program_id: "p".into(),
                    ground_truth: gt.into(),
                    extracted: ex.into(),
                    group,
                    note: String::new(),
                }
            })
            .collect();
        let r = compute_relevance(&MappingTable { records }).unwrap();
        let n = |k: u8| groups.iter().filter(|g| **g == k).count() as f64;
        let matched = n(0) + n(1);
        let check = |m: Option<f64>, denom: f64| match m {
            Some(v) => (v - matched / denom).abs() < 1e-12 && (0.0..=1.0).contains(&v),
            None => denom == 0.0,
        };
        prop_assert!(check(r.precision.as_f64(), matched + n(2)));
        prop_assert!(check(r.recall.as_f64(), matched + n(3)));
    }

    #[test]
    fn effectiveness_level_is_monotone(total in 1usize..40, a in 0usize..40, b in 0usize..40) {
        let (lo, hi) = (a.min(b).min(total), a.max(b).min(total));
        prop_assert!(effectiveness_level(lo, total) <= effectiveness_level(hi, total));
        let frac = hi as f64 / total as f64;
        let want = if frac >= 0.8 { Level::High } else if frac >= 0.4 { Level::Med } else { Level::Low };
        prop_assert_eq!(effectiveness_level(hi, total), want);
    }

    #[test]
    fn interval_guard_matches_comparison(v in -5.0f64..5.0, lo in -3.0f64..3.0, width in 0.0f64..3.0, closed in any::<bool>()) {
        let hi = lo + width;
        let g = GuardSpec {
            guard_id: "g".into(),
            property_text: "p".into(),
            constraints: vec![Constraint::Interval {
                field: "temp".into(),
                lo: Some(Bound { value: lo, closed }),
                hi: Some(Bound { value: hi, closed }),
            }],
            origin_pbt: "t".into(),
        };
        let mut rec = run_unmonitored(scenario_for("tcs", 1, 0).unwrap().as_mut()).remove(0);
        rec.set("temp", chekprop::corpus::Scalar::Float(v));
        let inside = if closed { lo <= v && v <= hi } else { lo < v && v < hi };
        prop_assert_eq!(GuardChecker::new(vec![g]).unwrap().violations(&rec).unwrap().is_empty(), inside);
    }

    #[test]
    fn every_commented_test_is_extracted(names in prop::collection::btree_set("[a-z]{1,8}", 1..6)) {
        let body: String = names
            .iter()
            .map(|n| format!("# property of {n}\ndef test_{n}(x):\n    assert x == x\n\n"))
            .collect();
        let found = extract_test_sources(&format!("Here you go.\n```python\n{body}```\n")).unwrap();
        let got: Vec<_> = found.iter().map(|s| s.name.clone()).collect();
        let want: Vec<_> = names.iter().map(|n| format!("test_{n}")).collect();
        prop_assert_eq!(got, want);
        for (s, n) in found.iter().zip(&names) {
            prop_assert_eq!(s.property.clone(), Some(format!("property of {n}")));
        }
    }

    #[test]
    fn digest_tracks_content(a in ".{0,40}", b in ".{0,40}") {
        let conv = |t: &str| Conversation::from(vec![Message::new(Role::User, t).unwrap()]);
        prop_assume!(!a.trim().is_empty() && !b.trim().is_empty());
        prop_assert_eq!(conversation_digest(&conv(&a)), conversation_digest(&conv(&a)));
        prop_assert_eq!(conversation_digest(&conv(&a)) == conversation_digest(&conv(&b)), a == b);
    }
}
