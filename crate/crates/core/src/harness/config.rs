use std::path::Path;

use crate::error::{Error, Result};
use crate::hydraulics::CircuitConstants;
use crate::problems::{ObjectiveVariant, Problem, ProblemKind};
use crate::space::StepSchedule;
use crate::tabu::SearchConfig;

/// One experiment: a problem, how many seeded runs, and every tunable.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub runs: usize,
    pub base_seed: u64,
    /// Worker threads for independent runs. The report does not depend on it.
    pub threads: usize,
    pub search: SearchConfig,
    pub reduction_factor: f64,
    pub constants: CircuitConstants,
    pub objective: ObjectiveVariant,
    /// Integration step, s.
    pub dt: f64,
    /// Simulated time, s.
    pub duration: f64,
}

impl ExperimentConfig {
    /// Ten runs from seed 0 with the problem's own defaults.
    pub fn new(problem: ProblemKind) -> Self {
        let p = Problem::new(problem);
        Self {
            problem,
            runs: 10,
            base_seed: 0,
            threads: 1,
            search: p.default_search(),
            reduction_factor: p.schedule().reduction_factor,
            constants: p.constants,
            objective: p.variant,
            dt: p.dt,
            duration: p.duration,
        }
    }

    /// The problem as configured.
    pub fn problem(&self) -> Problem {
        let mut p = Problem::new(self.problem);
        p.constants = self.constants.clone();
        p.variant = self.objective;
        p.dt = self.dt;
        p.duration = self.duration;
        p
    }

    pub fn schedule(&self) -> StepSchedule {
        let mut s = self.problem().schedule();
        s.reduction_factor = self.reduction_factor;
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Validation("runs must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Validation("threads must be at least 1".into()));
        }
        self.search.validate()?;
        let problem = self.problem();
        self.schedule().validate(&problem.space())?;
        problem.validate()
    }

    /// Every resolved setting as `(key, value)`, in the order the parser documents them.
    pub fn entries(&self) -> Vec<(String, String)> {
        let s = &self.search;
        let mut out: Vec<(String, String)> = vec![
            ("problem".into(), self.problem.to_string()),
            ("runs".into(), self.runs.to_string()),
            ("seed".into(), self.base_seed.to_string()),
            ("threads".into(), self.threads.to_string()),
            ("objective".into(), self.objective.as_str().into()),
            ("search.n".into(), s.tabu_capacity.to_string()),
            ("search.m".into(), s.memory_capacity.to_string()),
            ("search.intense".into(), s.intensify_at.to_string()),
            ("search.diverse".into(), s.diversify_at.to_string()),
            ("search.end_of_cycle".into(), s.end_of_cycle.to_string()),
            ("search.k".into(), s.pattern_factor.to_string()),
            ("search.reduction_factor".into(), self.reduction_factor.to_string()),
            ("search.max_evaluations".into(), s.max_evaluations.to_string()),
            ("search.restart_from_best".into(), s.restart_from_best.to_string()),
        ];
        if self.problem.is_circuit() {
            out.push(("simulation.dt".into(), self.dt.to_string()));
            out.push(("simulation.duration".into(), self.duration.to_string()));
            for (name, v) in constant_fields(&self.constants) {
                out.push((format!("constants.{name}"), v));
            }
        }
        out
    }

    /// Text that parses back to this config.
    pub fn to_config_text(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Set one field from its textual form. The error message does not name the key.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.search;
        match key {
            "problem" => return Err("problem can only be given once, first".into()),
            "runs" => self.runs = parse(value)?,
            "seed" | "base_seed" => self.base_seed = parse(value)?,
            "threads" => self.threads = parse(value)?,
            "objective" => self.objective = value.parse().map_err(|e: Error| e.to_string())?,
            "search.n" => s.tabu_capacity = parse(value)?,
            "search.m" => s.memory_capacity = parse(value)?,
            "search.intense" => s.intensify_at = parse(value)?,
            "search.diverse" => s.diversify_at = parse(value)?,
            "search.end_of_cycle" => s.end_of_cycle = parse(value)?,
            "search.k" => s.pattern_factor = parse_real(value)?,
            "search.reduction_factor" => self.reduction_factor = parse_real(value)?,
            "search.max_evaluations" => s.max_evaluations = parse(value)?,
            "search.restart_from_best" => s.restart_from_best = parse(value)?,
            "simulation.dt" => self.dt = parse_real(value)?,
            "simulation.duration" => self.duration = parse_real(value)?,
            _ => match key.strip_prefix("constants.") {
                Some(name) => set_constant(&mut self.constants, name, value)?,
                None => return Err("unknown key".into()),
            },
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| format!("cannot parse `{value}`: {e}"))
}

fn parse_real(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = parse(value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{value}` is not a finite number"))
    }
}

fn constant_fields(c: &CircuitConstants) -> Vec<(&'static str, String)> {
    vec![
        ("bulk_modulus", c.bulk_modulus.to_string()),
        ("line_volume", c.line_volume.to_string()),
        ("motor_inertia", c.motor_inertia.to_string()),
        ("viscous_damping", c.viscous_damping.to_string()),
        ("leakage_coefficient", c.leakage_coefficient.to_string()),
        (
            "relief_valve_gradient",
            c.relief_valve_gradient.map_or_else(|| "auto".to_string(), |g| g.to_string()),
        ),
        ("relief_overpressure", c.relief_overpressure.to_string()),
        ("pcfv_compensation_margin", c.pcfv_compensation_margin.to_string()),
        ("payload_mass", c.payload_mass.to_string()),
        ("piston_damping", c.piston_damping.to_string()),
        ("rod_diameter_ratio", c.rod_diameter_ratio.to_string()),
        ("valve_rated_pressure_drop", c.valve_rated_pressure_drop.to_string()),
        ("valve_laminar_threshold", c.valve_laminar_threshold.to_string()),
        ("valve_null_conductance", c.valve_null_conductance.to_string()),
    ]
}

fn set_constant(c: &mut CircuitConstants, name: &str, value: &str) -> std::result::Result<(), String> {
    if name == "relief_valve_gradient" {
        c.relief_valve_gradient = if value == "auto" { None } else { Some(parse_real(value)?) };
        return Ok(());
    }
    let slot = match name {
        "bulk_modulus" => &mut c.bulk_modulus,
        "line_volume" => &mut c.line_volume,
        "motor_inertia" => &mut c.motor_inertia,
        "viscous_damping" => &mut c.viscous_damping,
        "leakage_coefficient" => &mut c.leakage_coefficient,
        "relief_overpressure" => &mut c.relief_overpressure,
        "pcfv_compensation_margin" => &mut c.pcfv_compensation_margin,
        "payload_mass" => &mut c.payload_mass,
        "piston_damping" => &mut c.piston_damping,
        "rod_diameter_ratio" => &mut c.rod_diameter_ratio,
        "valve_rated_pressure_drop" => &mut c.valve_rated_pressure_drop,
        "valve_laminar_threshold" => &mut c.valve_laminar_threshold,
        "valve_null_conductance" => &mut c.valve_null_conductance,
        _ => return Err("unknown circuit constant".into()),
    };
    *slot = parse_real(value)?;
    Ok(())
}

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
///
/// `problem` is required and fixes the defaults the other keys override, so it
/// is applied first wherever it appears.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            field: content.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line,
                field: key.to_string(),
                message: "key and value must both be present".into(),
            });
        }
        if let Some(&(first, ..)) = pairs.iter().find(|p| p.1 == key) {
            return Err(Error::Parse {
                line,
                field: key.to_string(),
                message: format!("already set on line {first}"),
            });
        }
        pairs.push((line, key, value));
    }

    let &(line, _, name) = pairs
        .iter()
        .find(|p| p.1 == "problem")
        .ok_or_else(|| Error::Validation("missing required key `problem`".into()))?;
    let kind: ProblemKind = name.parse().map_err(|e: Error| Error::Parse {
        line,
        field: "problem".into(),
        message: e.to_string(),
    })?;
    let mut cfg = ExperimentConfig::new(kind);
    for &(line, key, value) in pairs.iter().filter(|p| p.1 != "problem") {
        cfg.set(key, value).map_err(|message| Error::Parse {
            line,
            field: key.to_string(),
            message,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config_str("problem = rastrigin\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::new(ProblemKind::Rastrigin));
        assert_eq!(cfg.runs, 10);
        assert_eq!(cfg.search, SearchConfig::default());
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# header\nsearch.n = 10\n\nproblem = transmission   # trailing\nseed = 42\nconstants.payload_mass = 300\nconstants.relief_valve_gradient = 1e-9\n";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.search.tabu_capacity, 10);
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.constants.payload_mass, 300.0);
        assert_eq!(cfg.constants.relief_valve_gradient, Some(1e-9));
    }

    #[test]
    fn zero_runs_is_a_validation_error() {
        let err = parse_config_str("problem = rastrigin\nruns = 0\n").unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("runs")), "{err}");
    }

    #[test]
    fn errors_name_line_and_field() {
        let cases = [
            ("problem = rastrigin\nsearch.n = seven\n", 2, "search.n"),
            ("problem = rastrigin\n\nsearch.bogus = 1\n", 3, "search.bogus"),
            ("problem = rastrigin\njust words\n", 2, "just words"),
            ("problem = pump\n", 1, "problem"),
            ("problem = rastrigin\nruns = 2\nruns = 3\n", 3, "runs"),
            ("problem = rastrigin\nsearch.k = inf\n", 2, "search.k"),
        ];
        for (text, want_line, want_field) in cases {
            match parse_config_str(text) {
                Err(Error::Parse { line, field, .. }) => {
                    assert_eq!((line, field.as_str()), (want_line, want_field), "{text:?}")
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn invariant_breaches_are_reported() {
        for text in [
            "problem = rastrigin\nsearch.intense = 20\n",
            "problem = rastrigin\nsearch.reduction_factor = 1\n",
            "problem = rastrigin\nobjective = pump_power\n",
            "problem = actuator\nsimulation.duration = 6\n",
            "problem = transmission\nconstants.bulk_modulus = -1\n",
        ] {
            assert!(parse_config_str(text).is_err(), "{text:?}");
        }
        assert!(matches!(parse_config_str("runs = 3\n"), Err(Error::Validation(_))));
    }

    #[test]
    fn config_text_round_trips() {
        for kind in ProblemKind::ALL {
            let mut cfg = ExperimentConfig::new(kind);
            cfg.base_seed = 99;
            cfg.search.tabu_capacity = 11;
            if kind.is_circuit() {
                cfg.constants.relief_valve_gradient = Some(3.5e-9);
                cfg.dt = 1e-4;
            }
            assert_eq!(parse_config_str(&cfg.to_config_text()).unwrap(), cfg);
        }
    }
}
