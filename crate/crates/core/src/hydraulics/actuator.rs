use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::constants::{relief_valve_flow, CircuitConstants};
use super::profile::DesiredProfile;
use super::trace::{simulate, spec, Model, SignalKind, SignalSpec, SimulationSettings, SimulationTrace};
use super::units::{bar_to_pa, cc_per_rev_to_m3_per_rad, lpm_to_m3s, mm_to_m, rpm_to_rad_s};

/// Cylinder positioned by a proportional valve under position feedback.
#[derive(Clone, Debug, PartialEq)]
pub struct ActuatorParams {
    /// cc/rev
    pub pump_displacement: f64,
    /// mm
    pub bore_diameter: f64,
    /// m
    pub stroke: f64,
    /// Valve flow at full opening and rated pressure drop, L/min.
    pub dcv_flow: f64,
    pub proportional_gain: f64,
    /// r/min
    pub pump_speed: f64,
    /// bar
    pub cracking_pressure: f64,
}

impl ActuatorParams {
    pub const PUMP_RANGE: (f64, f64) = (1.0, 500.0);
    pub const BORE_RANGE: (f64, f64) = (30.0, 70.0);
    pub const STROKE_RANGE: (f64, f64) = (0.01, 1.0);
    pub const DCV_RANGE: (f64, f64) = (25.0, 75.0);
    pub const GAIN_RANGE: (f64, f64) = (1.0, 300.0);

    /// 1500 r/min pump and 100 bar relief.
    pub fn new(pump_displacement: f64, bore_diameter: f64, stroke: f64, dcv_flow: f64, proportional_gain: f64) -> Self {
        Self {
            pump_displacement,
            bore_diameter,
            stroke,
            dcv_flow,
            proportional_gain,
            pump_speed: 1500.0,
            cracking_pressure: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pump_displacement", self.pump_displacement, Self::PUMP_RANGE),
            ("bore_diameter", self.bore_diameter, Self::BORE_RANGE),
            ("stroke", self.stroke, Self::STROKE_RANGE),
            ("dcv_flow", self.dcv_flow, Self::DCV_RANGE),
            ("proportional_gain", self.proportional_gain, Self::GAIN_RANGE),
        ];
        for (name, v, (lo, hi)) in fields {
            if !(lo..=hi).contains(&v) {
                return Err(Error::Validation(format!("{name} = {v} outside [{lo}, {hi}]")));
            }
        }
        if !(self.pump_speed > 0.0 && self.cracking_pressure > 0.0) {
            return Err(Error::Validation(format!("operating point must be positive: {self:?}")));
        }
        Ok(())
    }
}

struct Actuator {
    q_pump: f64,
    area_cap: f64,
    area_rod: f64,
    stroke: f64,
    q_nom: f64,
    gain: f64,
    crack: f64,
    gradient: f64,
    profile: DesiredProfile,
    c: CircuitConstants,
}

struct Flows {
    command: f64,
    relief: f64,
    supply_leak: f64,
    p_to_a: f64,
    p_to_b: f64,
    a_to_t: f64,
    b_to_t: f64,
    piston_a: f64,
    piston_b: f64,
}

impl Actuator {
    /// Turbulent orifice, linearised below the laminar threshold so it stays smooth at zero.
    fn orifice(&self, q_open: f64, dp: f64) -> f64 {
        let rated = self.c.valve_rated_pressure_drop;
        let th = self.c.valve_laminar_threshold;
        let metered = if dp.abs() >= th {
            dp.signum() * (dp.abs() / rated).sqrt()
        } else {
            dp / (th * rated).sqrt()
        };
        q_open * metered + self.c.valve_null_conductance * dp
    }

    // x = [P_supply, P_A, P_B, position, velocity]
    fn flows(&self, t: f64, x: &[f64]) -> Flows {
        let (ps, pa, pb, pos, vel) = (x[0], x[1], x[2], x[3], x[4]);
        let command = (self.gain * (self.profile.at(t) - pos)).clamp(-1.0, 1.0);
        let extend = command.max(0.0) * self.q_nom;
        let retract = (-command).max(0.0) * self.q_nom;
        Flows {
            command,
            relief: relief_valve_flow(ps, self.crack, self.gradient),
            supply_leak: self.c.leakage_coefficient * ps,
            p_to_a: self.orifice(extend, ps - pa),
            p_to_b: self.orifice(retract, ps - pb),
            a_to_t: self.orifice(retract, pa),
            b_to_t: self.orifice(extend, pb),
            piston_a: self.area_cap * vel,
            piston_b: self.area_rod * vel,
        }
    }

    fn chamber_volumes(&self, pos: f64) -> (f64, f64) {
        let v0 = self.c.line_volume;
        (v0 + self.area_cap * pos, v0 + self.area_rod * (self.stroke - pos))
    }

    fn force(&self, x: &[f64]) -> f64 {
        x[1] * self.area_cap - x[2] * self.area_rod - self.c.piston_damping * x[4]
    }
}

impl Model for Actuator {
    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; 5]
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let f = self.flows(t, x);
        let b = self.c.bulk_modulus;
        let (va, vb) = self.chamber_volumes(x[3]);
        dx[0] = b / self.c.line_volume * (self.q_pump - f.p_to_a - f.p_to_b - f.relief - f.supply_leak);
        dx[1] = b / va * (f.p_to_a - f.a_to_t - f.piston_a);
        dx[2] = b / vb * (f.p_to_b - f.b_to_t + f.piston_b);
        let force = self.force(x);
        let at_start = x[3] <= 0.0 && x[4] <= 0.0 && force <= 0.0;
        let at_end = x[3] >= self.stroke && x[4] >= 0.0 && force >= 0.0;
        if at_start || at_end {
            dx[3] = 0.0;
            dx[4] = 0.0;
        } else {
            dx[3] = x[4];
            dx[4] = force / self.c.payload_mass;
        }
    }

    fn constrain(&self, x: &mut [f64]) {
        if x[3] <= 0.0 {
            x[3] = 0.0;
            x[4] = x[4].max(0.0);
        } else if x[3] >= self.stroke {
            x[3] = self.stroke;
            x[4] = x[4].min(0.0);
        }
    }

    fn signals(&self) -> Vec<SignalSpec> {
        vec![
            spec("supply_pressure", "Pa", SignalKind::Pressure),
            spec("cap_pressure", "Pa", SignalKind::Pressure),
            spec("rod_pressure", "Pa", SignalKind::Pressure),
            spec("position", "m", SignalKind::Position),
            spec("velocity", "m/s", SignalKind::Velocity),
            spec("desired_position", "m", SignalKind::DesiredPosition),
            spec("command", "1", SignalKind::Command),
            spec("pump_flow", "m3/s", SignalKind::PumpFlow),
            spec("relief_flow", "m3/s", SignalKind::ReliefFlow),
            spec("supply_leak_flow", "m3/s", SignalKind::Flow),
            spec("p_to_a_flow", "m3/s", SignalKind::Flow),
            spec("p_to_b_flow", "m3/s", SignalKind::Flow),
            spec("a_to_t_flow", "m3/s", SignalKind::Flow),
            spec("b_to_t_flow", "m3/s", SignalKind::Flow),
            spec("cap_piston_flow", "m3/s", SignalKind::Flow),
            spec("rod_piston_flow", "m3/s", SignalKind::Flow),
            spec("supply_storage_flow", "m3/s", SignalKind::StorageFlow),
            spec("cap_storage_flow", "m3/s", SignalKind::StorageFlow),
            spec("rod_storage_flow", "m3/s", SignalKind::StorageFlow),
        ]
    }

    fn nodes(&self) -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>, &'static str)> {
        vec![
            (
                "supply",
                vec!["pump_flow"],
                vec!["p_to_a_flow", "p_to_b_flow", "relief_flow", "supply_leak_flow"],
                "supply_storage_flow",
            ),
            ("cap", vec!["p_to_a_flow"], vec!["a_to_t_flow", "cap_piston_flow"], "cap_storage_flow"),
            ("rod", vec!["p_to_b_flow", "rod_piston_flow"], vec!["b_to_t_flow"], "rod_storage_flow"),
        ]
    }

    fn record(&self, t: f64, x: &[f64], out: &mut Vec<f64>) {
        let f = self.flows(t, x);
        let mut dx = [0.0; 5];
        self.derivative(t, x, &mut dx);
        let (va, vb) = self.chamber_volumes(x[3]);
        let b = self.c.bulk_modulus;
        out.extend_from_slice(x);
        out.extend([
            self.profile.at(t),
            f.command,
            self.q_pump,
            f.relief,
            f.supply_leak,
            f.p_to_a,
            f.p_to_b,
            f.a_to_t,
            f.b_to_t,
            f.piston_a,
            f.piston_b,
            self.c.line_volume / b * dx[0],
            va / b * dx[1],
            vb / b * dx[2],
        ]);
    }
}

/// Integrate the supply and chamber pressures and the piston motion from rest at x = 0.
pub fn simulate_actuator(
    p: &ActuatorParams,
    c: &CircuitConstants,
    profile: &DesiredProfile,
    settings: &SimulationSettings,
) -> Result<SimulationTrace> {
    p.validate()?;
    c.validate()?;
    if !profile.covers(settings.duration) {
        return Err(Error::Validation(format!(
            "profile ends at {} s, before the {} s simulation",
            profile.end_time(),
            settings.duration
        )));
    }
    let bore = mm_to_m(p.bore_diameter);
    let area_cap = PI / 4.0 * bore * bore;
    let rod = bore * c.rod_diameter_ratio;
    let q_pump = cc_per_rev_to_m3_per_rad(p.pump_displacement) * rpm_to_rad_s(p.pump_speed);
    let model = Actuator {
        q_pump,
        area_cap,
        area_rod: area_cap - PI / 4.0 * rod * rod,
        stroke: p.stroke,
        q_nom: lpm_to_m3s(p.dcv_flow),
        gain: p.proportional_gain,
        crack: bar_to_pa(p.cracking_pressure),
        gradient: c.relief_gradient(q_pump),
        profile: profile.clone(),
        c: c.clone(),
    };
    simulate(&model, settings)
}

pub const ACTUATOR_DURATION: f64 = 5.0;
