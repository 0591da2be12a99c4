use crate::error::{Error, Result};

use super::constants::{relief_valve_flow, CircuitConstants};
use super::trace::{simulate, spec, Model, SignalKind, SignalSpec, SimulationSettings, SimulationTrace};
use super::units::{bar_to_pa, cc_per_rev_to_m3_per_rad, rpm_to_rad_s};

/// Pump driving a motor against a constant torque, with a relief valve on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionParams {
    /// cc/rev
    pub pump_displacement: f64,
    /// cc/rev
    pub motor_displacement: f64,
    /// r/min
    pub pump_speed: f64,
    /// N·m
    pub load_torque: f64,
    /// bar
    pub cracking_pressure: f64,
    pub eta_vp: f64,
    pub eta_vm: f64,
    pub eta_mm: f64,
}

impl TransmissionParams {
    pub const DISPLACEMENT_RANGE: (f64, f64) = (1.0, 1000.0);

    /// 1500 r/min pump, 100 N·m load, 100 bar relief, ideal efficiencies.
    pub fn new(pump_displacement: f64, motor_displacement: f64) -> Self {
        Self {
            pump_displacement,
            motor_displacement,
            pump_speed: 1500.0,
            load_torque: 100.0,
            cracking_pressure: 100.0,
            eta_vp: 1.0,
            eta_vm: 1.0,
            eta_mm: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::DISPLACEMENT_RANGE;
        for (name, d) in [("pump_displacement", self.pump_displacement), ("motor_displacement", self.motor_displacement)] {
            if !(lo..=hi).contains(&d) {
                return Err(Error::Validation(format!("{name} = {d} cc/rev outside [{lo}, {hi}]")));
            }
        }
        for (name, eta) in [("eta_vp", self.eta_vp), ("eta_vm", self.eta_vm), ("eta_mm", self.eta_mm)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::Validation(format!("{name} = {eta} outside (0, 1]")));
            }
        }
        if !(self.pump_speed > 0.0 && self.load_torque >= 0.0 && self.cracking_pressure > 0.0) {
            return Err(Error::Validation(format!("operating point must be positive: {self:?}")));
        }
        Ok(())
    }
}

struct Transmission {
    d_m: f64,
    q_pump: f64,
    load: f64,
    crack: f64,
    gradient: f64,
    eta_mm: f64,
    c: CircuitConstants,
}

impl Transmission {
    fn flows(&self, x: &[f64]) -> [f64; 4] {
        let (p, w) = (x[0], x[1]);
        let q_motor = self.d_m * w;
        let q_relief = relief_valve_flow(p, self.crack, self.gradient);
        let q_leak = self.c.leakage_coefficient * p;
        [self.q_pump, q_motor, q_relief, q_leak]
    }

    fn net_torque(&self, x: &[f64]) -> f64 {
        self.d_m * x[0] * self.eta_mm - self.load - self.c.viscous_damping * x[1]
    }
}

impl Model for Transmission {
    fn initial_state(&self) -> Vec<f64> {
        vec![0.0, 0.0]
    }

    fn derivative(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        let [qp, qm, qr, ql] = self.flows(x);
        dx[0] = self.c.bulk_modulus / self.c.line_volume * (qp - qm - qr - ql);
        let torque = self.net_torque(x);
        // The motor cannot be driven backwards by the load.
        dx[1] = if x[1] <= 0.0 && torque < 0.0 { 0.0 } else { torque / self.c.motor_inertia };
    }

    fn constrain(&self, x: &mut [f64]) {
        x[1] = x[1].max(0.0);
    }

    fn signals(&self) -> Vec<SignalSpec> {
        vec![
            spec("pressure", "Pa", SignalKind::MotorPressure),
            spec("motor_speed", "rad/s", SignalKind::MotorSpeed),
            spec("pump_flow", "m3/s", SignalKind::PumpFlow),
            spec("motor_flow", "m3/s", SignalKind::Flow),
            spec("relief_flow", "m3/s", SignalKind::ReliefFlow),
            spec("leak_flow", "m3/s", SignalKind::Flow),
            spec("storage_flow", "m3/s", SignalKind::StorageFlow),
        ]
    }

    fn nodes(&self) -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>, &'static str)> {
        vec![("line", vec!["pump_flow"], vec!["motor_flow", "relief_flow", "leak_flow"], "storage_flow")]
    }

    fn record(&self, t: f64, x: &[f64], out: &mut Vec<f64>) {
        let [qp, qm, qr, ql] = self.flows(x);
        let mut dx = [0.0; 2];
        self.derivative(t, x, &mut dx);
        let storage = self.c.line_volume / self.c.bulk_modulus * dx[0];
        out.extend([x[0], x[1], qp, qm, qr, ql, storage]);
    }
}

/// Integrate the line pressure and motor speed from rest.
pub fn simulate_transmission(
    p: &TransmissionParams,
    c: &CircuitConstants,
    settings: &SimulationSettings,
) -> Result<SimulationTrace> {
    p.validate()?;
    c.validate()?;
    let q_pump = cc_per_rev_to_m3_per_rad(p.pump_displacement) * rpm_to_rad_s(p.pump_speed) * p.eta_vp;
    let model = Transmission {
        d_m: cc_per_rev_to_m3_per_rad(p.motor_displacement),
        q_pump,
        load: p.load_torque,
        crack: bar_to_pa(p.cracking_pressure),
        gradient: c.relief_gradient(q_pump),
        eta_mm: p.eta_mm,
        c: c.clone(),
    };
    simulate(&model, settings)
}

pub const TRANSMISSION_DURATION: f64 = 5.0;
