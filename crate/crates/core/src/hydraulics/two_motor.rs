use crate::error::{Error, Result};

use super::constants::{relief_valve_flow, CircuitConstants};
use super::trace::{simulate, spec, Model, SignalKind, SignalSpec, SimulationSettings, SimulationTrace};
use super::units::{bar_to_pa, cc_per_rev_to_m3_per_rad, lpm_to_m3s, rpm_to_rad_s};

/// One pump feeding two motors through pressure compensated flow valves.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoMotorParams {
    /// cc/rev
    pub pump_displacement: f64,
    /// cc/rev
    pub motor_displacements: [f64; 2],
    /// Nominal valve settings, L/min.
    pub valve_flows: [f64; 2],
    /// N·m
    pub load_torques: [f64; 2],
    /// r/min
    pub pump_speed: f64,
    /// bar
    pub cracking_pressure: f64,
}

impl TwoMotorParams {
    pub const DISPLACEMENT_RANGE: (f64, f64) = (1.0, 1000.0);
    pub const VALVE_RANGE: (f64, f64) = (10.0, 100.0);

    /// 400 N·m on each motor, 1500 r/min pump, 100 bar relief.
    pub fn new(pump_displacement: f64, motor_displacements: [f64; 2], valve_flows: [f64; 2]) -> Self {
        Self {
            pump_displacement,
            motor_displacements,
            valve_flows,
            load_torques: [400.0, 400.0],
            pump_speed: 1500.0,
            cracking_pressure: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::DISPLACEMENT_RANGE;
        let displacements = [self.pump_displacement, self.motor_displacements[0], self.motor_displacements[1]];
        for (name, d) in ["pump", "motor 1", "motor 2"].iter().zip(displacements) {
            if !(lo..=hi).contains(&d) {
                return Err(Error::Validation(format!("{name} displacement {d} cc/rev outside [{lo}, {hi}]")));
            }
        }
        let (lo, hi) = Self::VALVE_RANGE;
        for (i, q) in self.valve_flows.iter().enumerate() {
            if !(lo..=hi).contains(q) {
                return Err(Error::Validation(format!("valve {} setting {q} L/min outside [{lo}, {hi}]", i + 1)));
            }
        }
        if !(self.pump_speed > 0.0 && self.cracking_pressure > 0.0 && self.load_torques.iter().all(|t| *t >= 0.0)) {
            return Err(Error::Validation(format!("operating point must be positive: {self:?}")));
        }
        Ok(())
    }
}

struct TwoMotor {
    q_pump: f64,
    d: [f64; 2],
    q_set: [f64; 2],
    load: [f64; 2],
    crack: f64,
    gradient: f64,
    c: CircuitConstants,
}

struct Flows {
    relief: f64,
    supply_leak: f64,
    valve: [f64; 2],
    motor: [f64; 2],
    leak: [f64; 2],
}

impl TwoMotor {
    // x = [P_supply, P_1, P_2, ω_1, ω_2]
    fn flows(&self, x: &[f64]) -> Flows {
        let k = self.c.leakage_coefficient;
        let valve = |i: usize| {
            let opening = ((x[0] - x[1 + i]) / self.c.pcfv_compensation_margin).clamp(0.0, 1.0);
            self.q_set[i] * opening
        };
        Flows {
            relief: relief_valve_flow(x[0], self.crack, self.gradient),
            supply_leak: k * x[0],
            valve: [valve(0), valve(1)],
            motor: [self.d[0] * x[3], self.d[1] * x[4]],
            leak: [k * x[1], k * x[2]],
        }
    }
}

impl Model for TwoMotor {
    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; 5]
    }

    fn derivative(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        let f = self.flows(x);
        let stiffness = self.c.bulk_modulus / self.c.line_volume;
        dx[0] = stiffness * (self.q_pump - f.valve[0] - f.valve[1] - f.relief - f.supply_leak);
        for i in 0..2 {
            dx[1 + i] = stiffness * (f.valve[i] - f.motor[i] - f.leak[i]);
            let w = x[3 + i];
            let torque = self.d[i] * x[1 + i] - self.load[i] - self.c.viscous_damping * w;
            dx[3 + i] = if w <= 0.0 && torque < 0.0 { 0.0 } else { torque / self.c.motor_inertia };
        }
    }

    fn constrain(&self, x: &mut [f64]) {
        x[3] = x[3].max(0.0);
        x[4] = x[4].max(0.0);
    }

    fn signals(&self) -> Vec<SignalSpec> {
        vec![
            spec("supply_pressure", "Pa", SignalKind::Pressure),
            spec("motor1_pressure", "Pa", SignalKind::MotorPressure),
            spec("motor2_pressure", "Pa", SignalKind::MotorPressure),
            spec("motor1_speed", "rad/s", SignalKind::MotorSpeed),
            spec("motor2_speed", "rad/s", SignalKind::MotorSpeed),
            spec("pump_flow", "m3/s", SignalKind::PumpFlow),
            spec("relief_flow", "m3/s", SignalKind::ReliefFlow),
            spec("supply_leak_flow", "m3/s", SignalKind::Flow),
            spec("valve1_flow", "m3/s", SignalKind::Flow),
            spec("valve2_flow", "m3/s", SignalKind::Flow),
            spec("motor1_flow", "m3/s", SignalKind::Flow),
            spec("motor2_flow", "m3/s", SignalKind::Flow),
            spec("branch1_leak_flow", "m3/s", SignalKind::Flow),
            spec("branch2_leak_flow", "m3/s", SignalKind::Flow),
            spec("supply_storage_flow", "m3/s", SignalKind::StorageFlow),
            spec("branch1_storage_flow", "m3/s", SignalKind::StorageFlow),
            spec("branch2_storage_flow", "m3/s", SignalKind::StorageFlow),
        ]
    }

    fn nodes(&self) -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>, &'static str)> {
        vec![
            (
                "supply",
                vec!["pump_flow"],
                vec!["valve1_flow", "valve2_flow", "relief_flow", "supply_leak_flow"],
                "supply_storage_flow",
            ),
            ("branch1", vec!["valve1_flow"], vec!["motor1_flow", "branch1_leak_flow"], "branch1_storage_flow"),
            ("branch2", vec!["valve2_flow"], vec!["motor2_flow", "branch2_leak_flow"], "branch2_storage_flow"),
        ]
    }

    fn record(&self, t: f64, x: &[f64], out: &mut Vec<f64>) {
        let f = self.flows(x);
        let mut dx = [0.0; 5];
        self.derivative(t, x, &mut dx);
        let compliance = self.c.line_volume / self.c.bulk_modulus;
        out.extend_from_slice(x);
        out.extend([
            self.q_pump,
            f.relief,
            f.supply_leak,
            f.valve[0],
            f.valve[1],
            f.motor[0],
            f.motor[1],
            f.leak[0],
            f.leak[1],
            compliance * dx[0],
            compliance * dx[1],
            compliance * dx[2],
        ]);
    }
}

/// Integrate supply and branch pressures and both motor speeds from rest.
pub fn simulate_two_motor(
    p: &TwoMotorParams,
    c: &CircuitConstants,
    settings: &SimulationSettings,
) -> Result<SimulationTrace> {
    p.validate()?;
    c.validate()?;
    let q_pump = cc_per_rev_to_m3_per_rad(p.pump_displacement) * rpm_to_rad_s(p.pump_speed);
    let model = TwoMotor {
        q_pump,
        d: p.motor_displacements.map(cc_per_rev_to_m3_per_rad),
        q_set: p.valve_flows.map(lpm_to_m3s),
        load: p.load_torques,
        crack: bar_to_pa(p.cracking_pressure),
        gradient: c.relief_gradient(q_pump),
        c: c.clone(),
    };
    simulate(&model, settings)
}

pub const TWO_MOTOR_DURATION: f64 = 2.0;
