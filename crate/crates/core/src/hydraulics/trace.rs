use std::io::Write;

use crate::error::{Error, Result};

use super::integrate::{rk4_step, Rk4Workspace};
use super::units::{m3s_to_lpm, pa_to_bar, rad_s_to_rpm};

/// What a recorded signal represents. Values are stored in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalKind {
    Pressure,
    /// Inlet pressure of a motor whose outlet drains to tank, i.e. its pressure drop.
    MotorPressure,
    MotorSpeed,
    Position,
    DesiredPosition,
    Velocity,
    Command,
    PumpFlow,
    ReliefFlow,
    Flow,
    /// Flow absorbed by fluid compression at a node, `(V/B)·dP/dt`.
    StorageFlow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub name: String,
    pub unit: &'static str,
    pub kind: SignalKind,
    pub values: Vec<f64>,
}

/// Flow bookkeeping for one hydraulic node, as indices into the trace signals.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub name: String,
    pub inflows: Vec<usize>,
    pub outflows: Vec<usize>,
    pub storage: usize,
}

/// Integration step, run length and recording interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationSettings {
    /// Integration step, s.
    pub dt: f64,
    /// s
    pub duration: f64,
    /// Spacing of recorded samples, s. Must be a whole number of steps.
    pub record_interval: f64,
}

impl SimulationSettings {
    pub const DEFAULT_DT: f64 = 5e-5;
    pub const DEFAULT_RECORD_INTERVAL: f64 = 1e-3;

    pub fn with_duration(duration: f64) -> Self {
        Self {
            dt: Self::DEFAULT_DT,
            duration,
            record_interval: Self::DEFAULT_RECORD_INTERVAL,
        }
    }

    fn whole_ratio(a: f64, b: f64) -> Option<usize> {
        let r = a / b;
        let n = r.round();
        ((r - n).abs() <= 1e-6 * n.max(1.0) && n >= 1.0).then_some(n as usize)
    }

    pub fn steps_per_record(&self) -> Result<usize> {
        Self::whole_ratio(self.record_interval, self.dt).ok_or_else(|| {
            Error::Validation(format!(
                "record interval {} is not a whole number of steps of {}",
                self.record_interval, self.dt
            ))
        })
    }

    pub fn record_count(&self) -> Result<usize> {
        Self::whole_ratio(self.duration, self.record_interval)
            .map(|n| n + 1)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "duration {} is not a whole number of record intervals {}",
                    self.duration, self.record_interval
                ))
            })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dt", self.dt), ("duration", self.duration), ("record_interval", self.record_interval)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} = {v} must be positive")));
            }
        }
        self.steps_per_record()?;
        self.record_count()?;
        Ok(())
    }
}

/// Recorded response of a circuit simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    /// Spacing of the recorded samples, s.
    pub dt: f64,
    /// Integration step that produced them, s.
    pub step: f64,
    pub duration: f64,
    pub time: Vec<f64>,
    pub signals: Vec<Signal>,
    pub nodes: Vec<Node>,
    /// Time at which the state stopped being finite.
    pub diverged_at: Option<f64>,
}

/// Steady values averaged over the end of a trace, in engineering units.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyMetrics {
    pub window: f64,
    pub speeds_rpm: Vec<f64>,
    pub speed_ripple_rpm: Vec<f64>,
    pub relief_flow_lpm: f64,
    pub pump_flow_lpm: f64,
    pub pressure_drops_bar: Vec<f64>,
    pub pressure_ripple_bar: Vec<f64>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn signal(&self, name: &str) -> Option<&Signal> {
        self.signals.iter().find(|s| s.name == name)
    }

    pub fn signals_of(&self, kind: SignalKind) -> impl Iterator<Item = &Signal> {
        self.signals.iter().filter(move |s| s.kind == kind)
    }

    fn single(&self, kind: SignalKind) -> Result<&Signal> {
        self.signals_of(kind)
            .next()
            .ok_or_else(|| Error::Contract(format!("trace has no {kind:?} signal")))
    }

    /// Index of the sample recorded at `t`, if `t` falls on the recording grid.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let r = t / self.dt;
        let i = r.round();
        ((r - i).abs() < 1e-6 && i >= 0.0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// Inflow minus outflow at `node` for sample `i`, ignoring compression.
    pub fn net_inflow(&self, node: &Node, i: usize) -> f64 {
        let inflow: f64 = node.inflows.iter().map(|&s| self.signals[s].values[i]).sum();
        let outflow: f64 = node.outflows.iter().map(|&s| self.signals[s].values[i]).sum();
        inflow - outflow
    }

    /// Write `time` then every signal as CSV, keeping every `every`-th sample.
    pub fn write_csv<W: Write>(&self, mut out: W, every: usize) -> Result<()> {
        if let Some(t) = self.diverged_at {
            return Err(Error::Diverged { time: t });
        }
        let every = every.max(1);
        write!(out, "time [s]")?;
        for s in &self.signals {
            write!(out, ",{} [{}]", s.name, s.unit)?;
        }
        writeln!(out)?;
        for i in (0..self.len()).step_by(every) {
            write!(out, "{}", self.time[i])?;
            for s in &self.signals {
                write!(out, ",{}", s.values[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Decimation factor for a requested output interval.
    pub fn decimation_for(&self, interval: f64) -> Result<usize> {
        SimulationSettings::whole_ratio(interval, self.dt).ok_or_else(|| {
            Error::Validation(format!("output interval {interval} is not a multiple of the record interval {}", self.dt))
        })
    }
}

fn mean_and_span(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, hi - lo)
}

/// Average each steady signal over the last `window` seconds of the trace.
pub fn steady_state_extract(trace: &SimulationTrace, window: f64) -> Result<SteadyMetrics> {
    if let Some(t) = trace.diverged_at {
        return Err(Error::Diverged { time: t });
    }
    if !(window > 0.0 && window < trace.duration) {
        return Err(Error::Contract(format!(
            "window {window} must be positive and shorter than the trace ({})",
            trace.duration
        )));
    }
    let start = trace.time.partition_point(|&t| t < trace.duration - window - 1e-12);
    fn tail(s: &Signal, start: usize) -> &[f64] {
        &s.values[start..]
    }
    let (speeds_rpm, speed_ripple_rpm): (Vec<f64>, Vec<f64>) = trace
        .signals_of(SignalKind::MotorSpeed)
        .map(|s| {
            let (m, r) = mean_and_span(tail(s, start));
            (rad_s_to_rpm(m), rad_s_to_rpm(r))
        })
        .unzip();
    let (pressure_drops_bar, pressure_ripple_bar): (Vec<f64>, Vec<f64>) = trace
        .signals_of(SignalKind::MotorPressure)
        .map(|s| {
            let (m, r) = mean_and_span(tail(s, start));
            (pa_to_bar(m), pa_to_bar(r))
        })
        .unzip();
    let relief = mean_and_span(tail(trace.single(SignalKind::ReliefFlow)?, start)).0;
    let pump = mean_and_span(tail(trace.single(SignalKind::PumpFlow)?, start)).0;
    Ok(SteadyMetrics {
        window,
        speeds_rpm,
        speed_ripple_rpm,
        relief_flow_lpm: m3s_to_lpm(relief.max(0.0)),
        pump_flow_lpm: m3s_to_lpm(pump),
        pressure_drops_bar,
        pressure_ripple_bar,
    })
}

/// Final 20 % of the trace.
pub fn default_window(duration: f64) -> f64 {
    0.2 * duration
}

pub(crate) struct SignalSpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub kind: SignalKind,
}

pub(crate) const fn spec(name: &'static str, unit: &'static str, kind: SignalKind) -> SignalSpec {
    SignalSpec { name, unit, kind }
}

/// A lumped circuit model the fixed-step driver can integrate.
pub(crate) trait Model {
    fn initial_state(&self) -> Vec<f64>;
    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]);
    /// Enforce hard limits (end stops, one-way clutches) after a step.
    fn constrain(&self, _x: &mut [f64]) {}
    fn signals(&self) -> Vec<SignalSpec>;
    /// (node name, inflow names, outflow names, storage name)
    fn nodes(&self) -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>, &'static str)>;
    /// Push one value per signal, in `signals()` order.
    fn record(&self, t: f64, x: &[f64], out: &mut Vec<f64>);
}

pub(crate) fn simulate<M: Model>(model: &M, settings: &SimulationSettings) -> Result<SimulationTrace> {
    settings.validate()?;
    let per_record = settings.steps_per_record()?;
    let records = settings.record_count()?;
    let specs = model.signals();
    let mut signals: Vec<Signal> = specs
        .iter()
        .map(|s| Signal {
            name: s.name.to_string(),
            unit: s.unit,
            kind: s.kind,
            values: Vec::with_capacity(records),
        })
        .collect();
    let index = |name: &str| -> usize {
        specs
            .iter()
            .position(|s| s.name == name)
            .unwrap_or_else(|| panic!("node refers to unknown signal {name}"))
    };
    let nodes = model
        .nodes()
        .into_iter()
        .map(|(name, ins, outs, storage)| Node {
            name: name.to_string(),
            inflows: ins.iter().map(|n| index(n)).collect(),
            outflows: outs.iter().map(|n| index(n)).collect(),
            storage: index(storage),
        })
        .collect();

    let mut x = model.initial_state();
    let mut work = Rk4Workspace::default();
    let mut row = Vec::with_capacity(signals.len());
    let mut time = Vec::with_capacity(records);
    let mut diverged_at = None;
    let mut deriv = |t: f64, x: &[f64], dx: &mut [f64]| model.derivative(t, x, dx);

    let push = |t: f64, x: &[f64], time: &mut Vec<f64>, signals: &mut Vec<Signal>, row: &mut Vec<f64>| -> bool {
        row.clear();
        model.record(t, x, row);
        time.push(t);
        let mut finite = true;
        for (s, &v) in signals.iter_mut().zip(row.iter()) {
            finite &= v.is_finite();
            s.values.push(v);
        }
        finite
    };
    push(0.0, &x, &mut time, &mut signals, &mut row);
    'outer: for r in 1..records {
        for k in 0..per_record {
            let t = ((r - 1) * per_record + k) as f64 * settings.dt;
            if !rk4_step(&mut deriv, t, &mut x, settings.dt, &mut work) {
                diverged_at = Some(t + settings.dt);
                break 'outer;
            }
            model.constrain(&mut x);
        }
        let t = (r * per_record) as f64 * settings.dt;
        if !push(t, &x, &mut time, &mut signals, &mut row) {
            diverged_at = Some(t);
            break;
        }
    }
    Ok(SimulationTrace {
        dt: settings.record_interval,
        step: settings.dt,
        duration: settings.duration,
        time,
        signals,
        nodes,
        diverged_at,
    })
}
