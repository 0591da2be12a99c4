//! Steady-state sizing of a pump and motor pair.
//!
//! All functions here work in SI units: displacements in m³/rad, speeds in
//! rad/s, pressures in Pa and flows in m³/s.

use crate::error::{Error, Result};

use super::units::{bar_to_pa, m3_per_rad_to_cc_per_rev, rpm_to_rad_s};

fn check_efficiency(name: &str, eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Contract(format!("{name} = {eta} is outside (0, 1]")))
    }
}

/// Motor torque `D_m·ΔP·η_mm`.
pub fn motor_torque(d_m: f64, dp: f64, eta_mm: f64) -> Result<f64> {
    if d_m < 0.0 {
        return Err(Error::Contract(format!("negative motor displacement {d_m}")));
    }
    check_efficiency("eta_mm", eta_mm)?;
    Ok(d_m * dp * eta_mm)
}

/// Flow a motor demands to turn at `omega`: `D_m·ω/η_vm`.
pub fn motor_flow(d_m: f64, omega: f64, eta_vm: f64) -> Result<f64> {
    if d_m < 0.0 {
        return Err(Error::Contract(format!("negative motor displacement {d_m}")));
    }
    check_efficiency("eta_vm", eta_vm)?;
    Ok(d_m * omega / eta_vm)
}

/// Flow a pump delivers: `D_p·ω_p·η_vp`.
pub fn pump_flow(d_p: f64, omega_p: f64, eta_vp: f64) -> Result<f64> {
    if d_p < 0.0 {
        return Err(Error::Contract(format!("negative pump displacement {d_p}")));
    }
    check_efficiency("eta_vp", eta_vp)?;
    Ok(d_p * omega_p * eta_vp)
}

/// Inputs of the designer's calculation, in engineering units.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingInputs {
    /// N·m
    pub load_torque: f64,
    /// r/min
    pub target_speed: f64,
    /// r/min
    pub pump_speed: f64,
    /// bar
    pub assumed_pressure: f64,
    pub eta_mm: f64,
    pub eta_vm: f64,
    pub eta_vp: f64,
}

impl Default for SizingInputs {
    /// 100 N·m at 300 r/min from a 1500 r/min pump, 85 bar, 95 % efficiencies.
    fn default() -> Self {
        Self {
            load_torque: 100.0,
            target_speed: 300.0,
            pump_speed: 1500.0,
            assumed_pressure: 85.0,
            eta_mm: 0.95,
            eta_vm: 0.95,
            eta_vp: 0.95,
        }
    }
}

/// Motor and pump displacements in cc/rev.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sizing {
    pub motor_displacement: f64,
    pub pump_displacement: f64,
}

/// Invert the torque equation for the motor, then balance pump and motor flow.
pub fn size_transmission(inputs: &SizingInputs) -> Result<Sizing> {
    let dp = bar_to_pa(inputs.assumed_pressure);
    if !(dp > 0.0 && inputs.load_torque > 0.0 && inputs.pump_speed > 0.0 && inputs.target_speed >= 0.0) {
        return Err(Error::Contract(format!("sizing inputs must be positive: {inputs:?}")));
    }
    check_efficiency("eta_mm", inputs.eta_mm)?;
    check_efficiency("eta_vp", inputs.eta_vp)?;
    let d_m = inputs.load_torque / (dp * inputs.eta_mm);
    let q = motor_flow(d_m, rpm_to_rad_s(inputs.target_speed), inputs.eta_vm)?;
    let d_p = q / (rpm_to_rad_s(inputs.pump_speed) * inputs.eta_vp);
    Ok(Sizing {
        motor_displacement: m3_per_rad_to_cc_per_rev(d_m),
        pump_displacement: m3_per_rad_to_cc_per_rev(d_p),
    })
}
