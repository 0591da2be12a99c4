//! Sizing equations and lumped dynamic models of the three fluid power circuits.
//!
//! Parameters are given in engineering units (cc/rev, r/min, bar, L/min, mm)
//! and converted to SI at the boundary. Traces are recorded in SI units.

mod actuator;
mod constants;
mod integrate;
mod profile;
mod sizing;
mod trace;
mod transmission;
mod two_motor;
pub mod units;

pub use constants::{relief_valve_flow, CircuitConstants};
pub use integrate::{rk4_step, Rk4Workspace};
pub use profile::DesiredProfile;
pub use sizing::{motor_flow, motor_torque, pump_flow, size_transmission, Sizing, SizingInputs};
pub use trace::{
    default_window, steady_state_extract, Node, Signal, SignalKind, SimulationSettings, SimulationTrace,
    SteadyMetrics,
};
pub use transmission::{simulate_transmission, TransmissionParams, TRANSMISSION_DURATION};
pub use two_motor::{simulate_two_motor, TwoMotorParams, TWO_MOTOR_DURATION};
pub use actuator::{simulate_actuator, ActuatorParams, ACTUATOR_DURATION};
