//! The five optimisation problems: search box, step schedule and objective for each.

use std::fmt;
use std::str::FromStr;

use crate::benchmarks::BenchmarkSpec;
use crate::error::{Error, Result};
use crate::hydraulics::{
    default_window, simulate_actuator, simulate_transmission, simulate_two_motor, steady_state_extract, ActuatorParams,
    CircuitConstants, DesiredProfile, SimulationSettings, SimulationTrace, SteadyMetrics, TransmissionParams,
    TwoMotorParams, ACTUATOR_DURATION, TRANSMISSION_DURATION, TWO_MOTOR_DURATION,
};
use crate::objectives::{actuator_objective, transmission_objective, transmission_pump_power_objective, two_motor_objective};
use crate::space::{Dimension, ParameterVector, SearchSpace, StepSchedule};
use crate::tabu::SearchConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Rastrigin,
    Schwefel,
    Transmission,
    TwoMotor,
    Actuator,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Rastrigin,
        ProblemKind::Schwefel,
        ProblemKind::Transmission,
        ProblemKind::TwoMotor,
        ProblemKind::Actuator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Rastrigin => "rastrigin",
            ProblemKind::Schwefel => "schwefel",
            ProblemKind::Transmission => "transmission",
            ProblemKind::TwoMotor => "two_motor",
            ProblemKind::Actuator => "actuator",
        }
    }

    pub fn is_circuit(self) -> bool {
        !matches!(self, ProblemKind::Rastrigin | ProblemKind::Schwefel)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown problem `{s}`")))
    }
}

/// Which transmission objective to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ObjectiveVariant {
    /// Speed error with the relief-flow penalty.
    #[default]
    Standard,
    /// Speed error weighted by pump power over load power.
    PumpPower,
}

impl ObjectiveVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveVariant::Standard => "standard",
            ObjectiveVariant::PumpPower => "pump_power",
        }
    }
}

impl FromStr for ObjectiveVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "pump_power" => Ok(Self::PumpPower),
            _ => Err(Error::Validation(format!("unknown objective variant `{s}`"))),
        }
    }
}

/// Speed targets, r/min.
pub const TRANSMISSION_TARGET: f64 = 300.0;
pub const TWO_MOTOR_TARGETS: [f64; 2] = [120.0, 60.0];

/// Everything needed to score a parameter vector for one problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: ProblemKind,
    pub constants: CircuitConstants,
    /// Integration step, s.
    pub dt: f64,
    /// Simulated time, s. Zero for the test functions.
    pub duration: f64,
    pub profile: DesiredProfile,
    pub variant: ObjectiveVariant,
}

/// A scored point together with the simulation behind it.
#[derive(Clone, Debug)]
pub struct Assessment {
    pub objective: f64,
    pub metrics: Option<SteadyMetrics>,
    pub trace: Option<SimulationTrace>,
}

fn dim(name: &str, unit: &str, lower: f64, upper: f64, grid: f64) -> Dimension {
    Dimension::new(name, unit, lower, upper, grid)
}

impl Problem {
    pub fn new(kind: ProblemKind) -> Self {
        Self {
            kind,
            constants: CircuitConstants::default(),
            dt: SimulationSettings::DEFAULT_DT,
            duration: default_duration(kind),
            profile: DesiredProfile::default_trapezoid(),
            variant: ObjectiveVariant::Standard,
        }
    }

    fn benchmark(&self) -> Option<BenchmarkSpec> {
        match self.kind {
            ProblemKind::Rastrigin => Some(BenchmarkSpec::rastrigin().expect("built-in benchmark")),
            ProblemKind::Schwefel => Some(BenchmarkSpec::schwefel().expect("built-in benchmark")),
            _ => None,
        }
    }

    pub fn space(&self) -> SearchSpace {
        if let Some(b) = self.benchmark() {
            return b.space;
        }
        let dims = match self.kind {
            ProblemKind::Transmission => vec![
                dim("pump_displacement", "cc/rev", 1.0, 1000.0, 1.0),
                dim("motor_displacement", "cc/rev", 1.0, 1000.0, 1.0),
            ],
            ProblemKind::TwoMotor => vec![
                dim("pump_displacement", "cc/rev", 1.0, 1000.0, 1.0),
                dim("motor1_displacement", "cc/rev", 1.0, 1000.0, 1.0),
                dim("motor2_displacement", "cc/rev", 1.0, 1000.0, 1.0),
                dim("valve1_flow", "L/min", 10.0, 100.0, 0.5),
                dim("valve2_flow", "L/min", 10.0, 100.0, 0.5),
            ],
            ProblemKind::Actuator => vec![
                dim("pump_displacement", "cc/rev", 1.0, 500.0, 1.0),
                dim("bore_diameter", "mm", 30.0, 70.0, 0.5),
                dim("stroke", "m", 0.01, 1.0, 0.01),
                dim("dcv_flow", "L/min", 25.0, 75.0, 1.0),
                dim("proportional_gain", "1", 1.0, 300.0, 1.0),
            ],
            ProblemKind::Rastrigin | ProblemKind::Schwefel => unreachable!(),
        };
        SearchSpace::new(dims).expect("built-in search space is valid")
    }

    pub fn schedule(&self) -> StepSchedule {
        if let Some(b) = self.benchmark() {
            return b.schedule;
        }
        let (initial, minimum) = match self.kind {
            ProblemKind::Transmission => (vec![64.0, 64.0], vec![1.0, 1.0]),
            ProblemKind::TwoMotor => (vec![64.0, 64.0, 64.0, 32.0, 32.0], vec![1.0, 1.0, 1.0, 0.5, 0.5]),
            ProblemKind::Actuator => (vec![64.0, 32.0, 0.64, 64.0, 64.0], vec![1.0, 0.5, 0.01, 1.0, 1.0]),
            ProblemKind::Rastrigin | ProblemKind::Schwefel => unreachable!(),
        };
        StepSchedule::new(initial, minimum, 2.0)
    }

    /// Memory and control settings used unless the experiment overrides them.
    ///
    /// Circuits use a shorter control cycle (6, 10, 15) than the generic
    /// default since every evaluation is a full simulation.
    pub fn default_search(&self) -> SearchConfig {
        self.benchmark().map(|b| b.search).unwrap_or(SearchConfig {
            intensify_at: 6,
            diversify_at: 10,
            end_of_cycle: 15,
            ..SearchConfig::default()
        })
    }

    pub fn settings(&self) -> SimulationSettings {
        SimulationSettings {
            dt: self.dt,
            ..SimulationSettings::with_duration(self.duration)
        }
    }

    pub fn transmission_params(p: &ParameterVector) -> TransmissionParams {
        TransmissionParams::new(p[0], p[1])
    }

    pub fn two_motor_params(p: &ParameterVector) -> TwoMotorParams {
        TwoMotorParams::new(p[0], [p[1], p[2]], [p[3], p[4]])
    }

    pub fn actuator_params(p: &ParameterVector) -> ActuatorParams {
        ActuatorParams::new(p[0], p[1], p[2], p[3], p[4])
    }

    /// Run the simulation for a circuit problem. `None` for the test functions.
    pub fn simulate(&self, p: &ParameterVector) -> Result<Option<SimulationTrace>> {
        self.space().check_dimension(p.dimension())?;
        let s = self.settings();
        let c = &self.constants;
        Ok(match self.kind {
            ProblemKind::Transmission => Some(simulate_transmission(&Self::transmission_params(p), c, &s)?),
            ProblemKind::TwoMotor => Some(simulate_two_motor(&Self::two_motor_params(p), c, &s)?),
            ProblemKind::Actuator => Some(simulate_actuator(&Self::actuator_params(p), c, &self.profile, &s)?),
            ProblemKind::Rastrigin | ProblemKind::Schwefel => None,
        })
    }

    /// Score a point, keeping the trace and steady metrics.
    pub fn assess(&self, p: &ParameterVector) -> Result<Assessment> {
        if let Some(b) = self.benchmark() {
            b.space.check_dimension(p.dimension())?;
            return Ok(Assessment {
                objective: b.evaluate(p),
                metrics: None,
                trace: None,
            });
        }
        let trace = self.simulate(p)?.expect("circuit problems simulate");
        if trace.is_diverged() {
            return Ok(Assessment {
                objective: f64::INFINITY,
                metrics: None,
                trace: Some(trace),
            });
        }
        let metrics = steady_state_extract(&trace, default_window(trace.duration))?;
        let objective = match (self.kind, self.variant) {
            (ProblemKind::Transmission, ObjectiveVariant::Standard) => transmission_objective(&metrics, TRANSMISSION_TARGET),
            (ProblemKind::Transmission, ObjectiveVariant::PumpPower) => {
                let load = Self::transmission_params(p).load_torque;
                transmission_pump_power_objective(&metrics, TRANSMISSION_TARGET, load)
            }
            (ProblemKind::TwoMotor, _) => two_motor_objective(&metrics, TWO_MOTOR_TARGETS[0], TWO_MOTOR_TARGETS[1]),
            (ProblemKind::Actuator, _) => actuator_objective(&trace, &self.profile),
            _ => unreachable!(),
        };
        Ok(Assessment {
            objective,
            metrics: Some(metrics),
            trace: Some(trace),
        })
    }

    /// Objective value; `+inf` when the point cannot be simulated.
    pub fn evaluate(&self, p: &ParameterVector) -> f64 {
        self.assess(p).map_or(f64::INFINITY, |a| a.objective)
    }

    /// Whether a final point counts as locating the optimum.
    ///
    /// Test functions: within 10⁻³ of −2 (Rastrigin) or 0.1 % of the minimum
    /// (Schwefel). Transmission: relief closed (< 10⁻³ L/min) and speed within
    /// 0.5 r/min. Two motors: both speeds within 0.5 r/min. Actuator: any
    /// finite objective, since it has no known optimum.
    pub fn is_success(&self, objective: f64, metrics: Option<&SteadyMetrics>) -> bool {
        if !objective.is_finite() {
            return false;
        }
        let near = |speeds: &[f64], targets: &[f64]| {
            speeds.len() == targets.len() && speeds.iter().zip(targets).all(|(s, t)| (s - t).abs() <= 0.5)
        };
        match self.kind {
            ProblemKind::Rastrigin => (objective + 2.0).abs() <= 1e-3,
            ProblemKind::Schwefel => {
                let b = self.benchmark().expect("benchmark");
                (objective - b.optimum_value).abs() <= 1e-3 * b.optimum_value.abs()
            }
            ProblemKind::Transmission => metrics
                .is_some_and(|m| m.relief_flow_lpm < 1e-3 && near(&m.speeds_rpm, &[TRANSMISSION_TARGET])),
            ProblemKind::TwoMotor => metrics.is_some_and(|m| near(&m.speeds_rpm, &TWO_MOTOR_TARGETS)),
            ProblemKind::Actuator => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant == ObjectiveVariant::PumpPower && self.kind != ProblemKind::Transmission {
            return Err(Error::Validation("the pump_power objective applies to the transmission only".into()));
        }
        if !self.kind.is_circuit() {
            return Ok(());
        }
        self.constants.validate()?;
        self.settings().validate()?;
        if self.kind == ProblemKind::Actuator && !self.profile.covers(self.duration) {
            return Err(Error::Validation("desired profile does not cover the simulation".into()));
        }
        Ok(())
    }
}

fn default_duration(kind: ProblemKind) -> f64 {
    match kind {
        ProblemKind::Transmission => TRANSMISSION_DURATION,
        ProblemKind::TwoMotor => TWO_MOTOR_DURATION,
        ProblemKind::Actuator => ACTUATOR_DURATION,
        ProblemKind::Rastrigin | ProblemKind::Schwefel => 0.0,
    }
}

impl crate::tabu::Objective for Problem {
    fn evaluate(&self, point: &ParameterVector) -> f64 {
        Problem::evaluate(self, point)
    }
}
