//! Circuit objective functions built from simulation results.

use crate::error::{Error, Result};
use crate::hydraulics::{DesiredProfile, SignalKind, SimulationTrace, SteadyMetrics};

/// Relief flow and pump flow in L/min.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyRatio {
    pub relief_flow: f64,
    pub pump_flow: f64,
}

/// `1 + Q_rv/Q_p`: the fraction of pump flow spilled over the relief valve, plus one.
pub fn penalty_multiplier(pr: PenaltyRatio) -> Result<f64> {
    if !(pr.pump_flow > 0.0) {
        return Err(Error::Contract(format!("pump flow {} must be positive", pr.pump_flow)));
    }
    if !(pr.relief_flow >= 0.0) {
        return Err(Error::Contract(format!("relief flow {} must be non-negative", pr.relief_flow)));
    }
    Ok(1.0 + pr.relief_flow / pr.pump_flow)
}

fn steady_penalty(m: &SteadyMetrics) -> Result<f64> {
    penalty_multiplier(PenaltyRatio {
        relief_flow: m.relief_flow_lpm,
        pump_flow: m.pump_flow_lpm,
    })
}

fn infinite_on_error(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

/// Squared speed error (r/min) times the relief penalty.
pub fn transmission_objective(m: &SteadyMetrics, target_rpm: f64) -> f64 {
    infinite_on_error((|| {
        let speed = *m.speeds_rpm.first().ok_or_else(|| Error::Contract("no motor speed".into()))?;
        let e = target_rpm - speed;
        Ok(e * e * steady_penalty(m)?)
    })())
}

/// `(|e₁| + |e₂|)²` times the relief penalty.
pub fn two_motor_objective(m: &SteadyMetrics, target1_rpm: f64, target2_rpm: f64) -> f64 {
    infinite_on_error((|| {
        let [w1, w2] = m.speeds_rpm[..] else {
            return Err(Error::Contract(format!("expected two motor speeds, got {}", m.speeds_rpm.len())));
        };
        let sum = (target1_rpm - w1).abs() + (target2_rpm - w2).abs();
        Ok(sum * sum * steady_penalty(m)?)
    })())
}

/// Sum over the profile's sample instants of `|x_d − x_a|` times the penalty at that instant.
pub fn actuator_objective(trace: &SimulationTrace, profile: &DesiredProfile) -> f64 {
    infinite_on_error((|| {
        if let Some(t) = trace.diverged_at {
            return Err(Error::Diverged { time: t });
        }
        let find = |kind| {
            trace
                .signals_of(kind)
                .next()
                .ok_or_else(|| Error::Contract(format!("trace has no {kind:?} signal")))
        };
        let position = find(SignalKind::Position)?;
        let relief = find(SignalKind::ReliefFlow)?;
        let pump = find(SignalKind::PumpFlow)?;
        let mut total = 0.0;
        for t in profile.sample_times(trace.duration) {
            let i = trace
                .index_at(t)
                .ok_or_else(|| Error::Contract(format!("sample time {t} is not on the trace grid")))?;
            let penalty = penalty_multiplier(PenaltyRatio {
                relief_flow: relief.values[i],
                pump_flow: pump.values[i],
            })?;
            total += (profile.at(t) - position.values[i]).abs() * penalty;
        }
        Ok(total)
    })())
}

/// Squared speed error times `W_pump / W_load`, where `W_pump = P·Q_p` is the
/// hydraulic power drawn from the pump and `W_load = T·ω` is delivered to the load.
pub fn transmission_pump_power_objective(
    m: &SteadyMetrics,
    target_rpm: f64,
    load_torque: f64,
) -> f64 {
    infinite_on_error((|| {
        let speed = *m.speeds_rpm.first().ok_or_else(|| Error::Contract("no motor speed".into()))?;
        let pressure = *m.pressure_drops_bar.first().ok_or_else(|| Error::Contract("no line pressure".into()))?;
        // bar·L/min to W: 1e5 / 60000.
        let pump_power = pressure * m.pump_flow_lpm * 1e5 / 60_000.0;
        let load_power = load_torque * speed * std::f64::consts::PI / 30.0;
        if !(load_power > 0.0) {
            return Err(Error::Contract("motor delivers no power".into()));
        }
        let e = target_rpm - speed;
        Ok(e * e * (pump_power / load_power))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydraulics::{Signal, SimulationTrace};
    use proptest::prelude::*;

    fn metrics(speeds: &[f64], relief: f64, pump: f64) -> SteadyMetrics {
        SteadyMetrics {
            window: 1.0,
            speeds_rpm: speeds.to_vec(),
            speed_ripple_rpm: vec![0.0; speeds.len()],
            relief_flow_lpm: relief,
            pump_flow_lpm: pump,
            pressure_drops_bar: vec![50.0; speeds.len()],
            pressure_ripple_bar: vec![0.0; speeds.len()],
        }
    }

    #[test]
    fn penalty_examples() {
        let p = |r, q| penalty_multiplier(PenaltyRatio { relief_flow: r, pump_flow: q });
        assert_eq!(p(0.0, 10.0).unwrap(), 1.0);
        assert_eq!(p(10.0, 10.0).unwrap(), 2.0);
        assert!((p(12.9587, 158.202).unwrap() - 1.0819).abs() < 1e-4);
        assert!(p(1.0, 0.0).is_err());
    }

    #[test]
    fn transmission_examples() {
        assert!((transmission_objective(&metrics(&[300.236], 0.0, 50.0), 300.0) - 0.055707).abs() < 1e-4);
        assert!((transmission_objective(&metrics(&[300.0816], 0.0, 50.0), 300.0) - 0.006667).abs() < 1e-5);
        assert_eq!(transmission_objective(&metrics(&[300.0], 0.0, 50.0), 300.0), 0.0);
        assert_eq!(transmission_objective(&metrics(&[300.0], 0.0, 0.0), 300.0), f64::INFINITY);
    }

    #[test]
    fn two_motor_examples() {
        assert_eq!(two_motor_objective(&metrics(&[120.0, 60.0], 0.0, 100.0), 120.0, 60.0), 0.0);
        let v = two_motor_objective(&metrics(&[120.03, 59.93], 0.0, 100.0), 120.0, 60.0);
        assert!((v - 0.01).abs() < 1e-12);
        // Q_rv/Q_p = 0.0819 with e = 0.015 and 0.0002.
        let v = two_motor_objective(&metrics(&[119.985, 60.0002], 8.19, 100.0), 120.0, 60.0);
        assert!((v - 0.0152f64.powi(2) * 1.0819).abs() < 1e-12);
        assert!((v - 2.50e-4).abs() < 1e-6);
    }

    fn synthetic_trace(position: Vec<f64>, relief: Vec<f64>) -> SimulationTrace {
        let n = position.len();
        let sig = |name: &str, kind, values| Signal { name: name.into(), unit: "", kind, values };
        SimulationTrace {
            dt: 0.1,
            step: 0.1,
            duration: (n - 1) as f64 * 0.1,
            time: (0..n).map(|i| i as f64 * 0.1).collect(),
            signals: vec![
                sig("position", SignalKind::Position, position),
                sig("relief_flow", SignalKind::ReliefFlow, relief),
                sig("pump_flow", SignalKind::PumpFlow, vec![1.0; n]),
            ],
            nodes: vec![],
            diverged_at: None,
        }
    }

    #[test]
    fn actuator_examples() {
        let flat = DesiredProfile::new(vec![(0.0, 0.1), (5.0, 0.1)], 0.1).unwrap();
        let perfect = synthetic_trace(vec![0.1; 51], vec![0.0; 51]);
        assert_eq!(actuator_objective(&perfect, &flat), 0.0);

        let off = synthetic_trace(vec![0.11; 51], vec![0.0; 51]);
        assert!((actuator_objective(&off, &flat) - 0.51).abs() < 1e-12);

        let mut pos = vec![0.1; 51];
        pos[17] = 0.12;
        let mut relief = vec![0.0; 51];
        relief[17] = 0.5;
        let one = synthetic_trace(pos, relief);
        assert!((actuator_objective(&one, &flat) - 0.03).abs() < 1e-12);

        let mut diverged = synthetic_trace(vec![0.1; 51], vec![0.0; 51]);
        diverged.diverged_at = Some(1.0);
        assert_eq!(actuator_objective(&diverged, &flat), f64::INFINITY);
    }

    #[test]
    fn pump_power_rewards_less_spill() {
        let mut m = metrics(&[299.0], 0.0, 30.0);
        let base = transmission_pump_power_objective(&m, 300.0, 100.0);
        m.pump_flow_lpm = 40.0;
        assert!(transmission_pump_power_objective(&m, 300.0, 100.0) > base);
    }

    proptest! {
        #[test]
        fn objectives_nonnegative_and_monotone_in_relief(
            e1 in -50.0f64..50.0,
            e2 in -50.0f64..50.0,
            qp in 1.0f64..300.0,
            r1 in 0.0f64..100.0,
            dr in 1e-3f64..100.0,
        ) {
            let t = transmission_objective(&metrics(&[300.0 + e1], r1, qp), 300.0);
            prop_assert!(t >= 0.0);
            let mirrored = transmission_objective(&metrics(&[300.0 - e1], r1, qp), 300.0);
            prop_assert!((t - mirrored).abs() <= 1e-9 * t.max(1.0));
            let w = two_motor_objective(&metrics(&[120.0 + e1, 60.0 + e2], r1, qp), 120.0, 60.0);
            prop_assert!(w >= 0.0);
            let mirrored = two_motor_objective(&metrics(&[120.0 - e1, 60.0 - e2], r1, qp), 120.0, 60.0);
            prop_assert!((w - mirrored).abs() <= 1e-9 * w.max(1.0));
            if e1 != 0.0 {
                prop_assert!(transmission_objective(&metrics(&[300.0 + e1], r1 + dr, qp), 300.0) > t);
                prop_assert!(two_motor_objective(&metrics(&[120.0 + e1, 60.0 + e2], r1 + dr, qp), 120.0, 60.0) > w);
            }
            // Closed relief valve: pump flow does not matter.
            let speed = 300.0 + e1;
            prop_assert_eq!(
                transmission_objective(&metrics(&[speed], 0.0, qp), 300.0),
                (300.0 - speed) * (300.0 - speed)
            );
        }
    }
}
