use crate::error::{Error, Result};

use super::units::bar_to_pa;

/// Physical constants shared by the circuit models, in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitConstants {
    /// Pa
    pub bulk_modulus: f64,
    /// Fluid volume of each hydraulic node, m³. Also the dead volume of each actuator chamber.
    pub line_volume: f64,
    /// kg·m²
    pub motor_inertia: f64,
    /// N·m·s/rad
    pub viscous_damping: f64,
    /// Leakage to tank from every node, m³/(s·Pa).
    pub leakage_coefficient: f64,
    /// Fixed relief gradient in m³/(s·Pa). When `None` the gradient is sized so
    /// the valve passes the full pump flow at `relief_overpressure` above cracking.
    pub relief_valve_gradient: Option<f64>,
    /// Pa
    pub relief_overpressure: f64,
    /// Pa
    pub pcfv_compensation_margin: f64,
    /// kg
    pub payload_mass: f64,
    /// Piston viscous friction, N·s/m.
    pub piston_damping: f64,
    pub rod_diameter_ratio: f64,
    /// Pressure drop at which a fully open valve passes its nominal flow, Pa.
    pub valve_rated_pressure_drop: f64,
    /// Below this pressure drop the orifice law is linearised, Pa.
    pub valve_laminar_threshold: f64,
    /// Leakage conductance across each closed valve path, m³/(s·Pa).
    pub valve_null_conductance: f64,
}

impl Default for CircuitConstants {
    fn default() -> Self {
        Self {
            bulk_modulus: 1.4e9,
            line_volume: 1e-3,
            motor_inertia: 0.5,
            viscous_damping: 0.05,
            leakage_coefficient: 2e-11,
            relief_valve_gradient: None,
            relief_overpressure: bar_to_pa(10.0),
            pcfv_compensation_margin: bar_to_pa(5.0),
            payload_mass: 250.0,
            piston_damping: 2000.0,
            rod_diameter_ratio: 0.6,
            valve_rated_pressure_drop: bar_to_pa(35.0),
            valve_laminar_threshold: bar_to_pa(1.0),
            valve_null_conductance: 2e-11,
        }
    }
}

impl CircuitConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bulk_modulus", self.bulk_modulus),
            ("line_volume", self.line_volume),
            ("motor_inertia", self.motor_inertia),
            ("viscous_damping", self.viscous_damping),
            ("leakage_coefficient", self.leakage_coefficient),
            ("relief_overpressure", self.relief_overpressure),
            ("pcfv_compensation_margin", self.pcfv_compensation_margin),
            ("payload_mass", self.payload_mass),
            ("piston_damping", self.piston_damping),
            ("valve_rated_pressure_drop", self.valve_rated_pressure_drop),
            ("valve_laminar_threshold", self.valve_laminar_threshold),
            ("valve_null_conductance", self.valve_null_conductance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("constant {name} = {v} must be positive")));
            }
        }
        if let Some(g) = self.relief_valve_gradient {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Validation(format!("relief_valve_gradient = {g} must be positive")));
            }
        }
        if !(self.rod_diameter_ratio > 0.0 && self.rod_diameter_ratio < 1.0) {
            return Err(Error::Validation(format!(
                "rod_diameter_ratio = {} must lie in (0, 1)",
                self.rod_diameter_ratio
            )));
        }
        Ok(())
    }

    /// Relief gradient for a circuit whose pump delivers `pump_flow` m³/s.
    pub fn relief_gradient(&self, pump_flow: f64) -> f64 {
        self.relief_valve_gradient
            .unwrap_or(pump_flow / self.relief_overpressure)
    }
}

/// Static overflow law: `max(0, gradient·(P − P_crack))`.
pub fn relief_valve_flow(pressure: f64, cracking_pressure: f64, gradient: f64) -> f64 {
    (gradient * (pressure - cracking_pressure)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relief_law() {
        let crack = bar_to_pa(100.0);
        assert_eq!(relief_valve_flow(bar_to_pa(50.0), crack, 1e-8), 0.0);
        assert_eq!(relief_valve_flow(crack, crack, 1e-8), 0.0);
        let c = CircuitConstants::default();
        let q_pump = 4.6e-3;
        let g = c.relief_gradient(q_pump);
        let q = relief_valve_flow(crack + bar_to_pa(10.0), crack, g);
        assert!((q - q_pump).abs() < 1e-15);
    }

    #[test]
    fn fixed_gradient_overrides_sizing() {
        let c = CircuitConstants {
            relief_valve_gradient: Some(3e-9),
            ..CircuitConstants::default()
        };
        assert_eq!(c.relief_gradient(1.0), 3e-9);
    }

    #[test]
    fn validation() {
        assert!(CircuitConstants::default().validate().is_ok());
        let bad = CircuitConstants { rod_diameter_ratio: 1.0, ..CircuitConstants::default() };
        assert!(bad.validate().is_err());
        let bad = CircuitConstants { bulk_modulus: 0.0, ..CircuitConstants::default() };
        assert!(bad.validate().is_err());
    }
}
