//! Seeded multi-run experiments, their CSV reports, the designer's sizing
//! comparison and trace export.

mod config;
mod report;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::hydraulics::{
    default_window, simulate_transmission, size_transmission, steady_state_extract, CircuitConstants, SimulationSettings,
    SimulationTrace, Sizing, SizingInputs, TransmissionParams, TRANSMISSION_DURATION,
};
use crate::problems::Problem;
use crate::tabu::run;

pub use config::{parse_config, parse_config_str, ExperimentConfig};
pub use report::{ExperimentReport, RunOutcome, RunRow, Summary};

/// Carry out run `index` of the experiment with seed `base_seed + index`.
pub fn run_single(cfg: &ExperimentConfig, problem: &Problem, index: usize) -> RunRow {
    let seed = cfg.base_seed.wrapping_add(index as u64);
    let search = cfg.search.clone().with_seed(seed);
    let outcome = run(&problem.space(), &cfg.schedule(), problem, &search)
        .and_then(|r| {
            let metrics = if problem.kind.is_circuit() && r.best.value.is_finite() {
                problem.assess(&r.best.point)?.metrics
            } else {
                None
            };
            Ok(RunOutcome {
                success: problem.is_success(r.best.value, metrics.as_ref()),
                point: r.best.point.into_values(),
                objective: r.best.value,
                evaluations: r.evaluations_used,
                termination: r.terminated_by,
                non_finite_evaluations: r.non_finite_evaluations,
                metrics,
            })
        })
        .map_err(|e| e.to_string());
    RunRow { run: index, seed, outcome }
}

/// Run every seed of the experiment. Runs are spread over `cfg.threads`
/// workers; rows come back in run order either way.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let problem = cfg.problem();
    let workers = cfg.threads.min(cfg.runs);
    let rows: Vec<RunRow> = if workers <= 1 {
        (0..cfg.runs).map(|i| run_single(cfg, &problem, i)).collect()
    } else {
        let mut slots: Vec<Option<RunRow>> = vec![None; cfg.runs];
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let problem = &problem;
                    s.spawn(move || {
                        (w..cfg.runs)
                            .step_by(workers)
                            .map(|i| run_single(cfg, problem, i))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for row in h.join().expect("run worker panicked") {
                    let i = row.run;
                    slots[i] = Some(row);
                }
            }
        });
        slots.into_iter().map(|r| r.expect("every run index is covered")).collect()
    };
    let parameter_columns = problem
        .space()
        .dims()
        .iter()
        .map(|d| if d.unit.is_empty() { d.name.clone() } else { format!("{} [{}]", d.name, d.unit) })
        .collect();
    Ok(ExperimentReport {
        summary: Summary::from_rows(&rows),
        config: cfg.clone(),
        parameter_columns,
        rows,
    })
}

/// One line of the sizing comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingRow {
    pub label: String,
    /// cc/rev
    pub pump_displacement: f64,
    /// cc/rev
    pub motor_displacement: f64,
    /// Steady motor speed and relief flow from simulation, if requested.
    pub simulated: Option<(f64, f64)>,
}

/// The designer's hand calculation next to any other candidate designs.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingReport {
    pub inputs: SizingInputs,
    pub designer: Sizing,
    pub rows: Vec<SizingRow>,
}

/// Size the transmission by hand and list it with `candidates`
/// (`(label, pump, motor)` in cc/rev). With `constants`, every row is also
/// simulated at the load and pump speed of `inputs`.
pub fn sizing_report(
    inputs: &SizingInputs,
    candidates: &[(String, f64, f64)],
    constants: Option<&CircuitConstants>,
) -> Result<SizingReport> {
    let designer = size_transmission(inputs)?;
    let mut rows = vec![SizingRow {
        label: "designer".into(),
        pump_displacement: designer.pump_displacement,
        motor_displacement: designer.motor_displacement,
        simulated: None,
    }];
    rows.extend(candidates.iter().map(|(label, pump, motor)| SizingRow {
        label: label.clone(),
        pump_displacement: *pump,
        motor_displacement: *motor,
        simulated: None,
    }));
    if let Some(c) = constants {
        let settings = SimulationSettings::with_duration(TRANSMISSION_DURATION);
        for row in &mut rows {
            let p = TransmissionParams {
                pump_speed: inputs.pump_speed,
                load_torque: inputs.load_torque,
                ..TransmissionParams::new(row.pump_displacement, row.motor_displacement)
            };
            let trace = simulate_transmission(&p, c, &settings)?;
            let m = steady_state_extract(&trace, default_window(trace.duration))?;
            row.simulated = Some((m.speeds_rpm[0], m.relief_flow_lpm));
        }
    }
    Ok(SizingReport {
        inputs: inputs.clone(),
        designer,
        rows,
    })
}

impl fmt::Display for SizingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.inputs;
        writeln!(
            f,
            "load {} N·m at {} r/min, pump {} r/min, {} bar, efficiencies mm {} vm {} vp {}",
            i.load_torque, i.target_speed, i.pump_speed, i.assumed_pressure, i.eta_mm, i.eta_vm, i.eta_vp
        )?;
        writeln!(
            f,
            "{:<16} {:>12} {:>12} {:>14} {:>14}",
            "design", "pump cc/rev", "motor cc/rev", "speed r/min", "relief L/min"
        )?;
        for r in &self.rows {
            let (speed, relief) = match r.simulated {
                Some((s, q)) => (format!("{s:.3}"), format!("{q:.4}")),
                None => ("-".into(), "-".into()),
            };
            writeln!(
                f,
                "{:<16} {:>12.2} {:>12.2} {:>14} {:>14}",
                r.label, r.pump_displacement, r.motor_displacement, speed, relief
            )?;
        }
        Ok(())
    }
}

/// Write `trace` as CSV, keeping one row per `interval` seconds (every
/// recorded sample when `None`). Returns the number of data rows.
pub fn export_trace(trace: &SimulationTrace, path: impl AsRef<Path>, interval: Option<f64>) -> Result<usize> {
    let every = match interval {
        Some(dt) => trace.decimation_for(dt)?,
        None => 1,
    };
    if let Some(t) = trace.diverged_at {
        return Err(crate::error::Error::Diverged { time: t });
    }
    let mut out = BufWriter::new(File::create(path)?);
    trace.write_csv(&mut out, every)?;
    out.flush()?;
    Ok(trace.len().div_ceil(every))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemKind;
    use crate::tabu::Termination;

    fn quick(kind: ProblemKind, runs: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.runs = runs;
        cfg.base_seed = 5;
        cfg
    }

    #[test]
    fn single_run_matches_direct_engine_call() {
        let cfg = quick(ProblemKind::Rastrigin, 1);
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        let p = cfg.problem();
        let direct = run(&p.space(), &p.schedule(), &p, &p.default_search().with_seed(5)).unwrap();
        let row = report.rows[0].outcome.as_ref().unwrap();
        assert_eq!(row.point, direct.best.point.values());
        assert_eq!(row.objective, direct.best.value);
        assert_eq!(row.evaluations, direct.evaluations_used);
    }

    #[test]
    fn threads_do_not_change_the_report() {
        let mut cfg = quick(ProblemKind::Rastrigin, 5);
        let serial = run_experiment(&cfg).unwrap().to_csv_string();
        cfg.threads = 3;
        let parallel = run_experiment(&cfg).unwrap();
        assert_eq!(parallel.to_csv_string().replace("# threads = 3", "# threads = 1"), serial);
    }

    #[test]
    fn summary_mean_is_row_mean() {
        let report = run_experiment(&quick(ProblemKind::Rastrigin, 4)).unwrap();
        let evals: Vec<u64> = report.rows.iter().map(|r| r.outcome.as_ref().unwrap().evaluations).collect();
        assert_eq!(report.summary.mean_evaluations, evals.iter().sum::<u64>() as f64 / 4.0);
        assert_eq!(report.summary.runs, 4);
        assert!(report.rows.iter().enumerate().all(|(i, r)| r.run == i && r.seed == 5 + i as u64));
    }

    #[test]
    fn failed_rows_are_kept() {
        let rows = vec![
            RunRow {
                run: 0,
                seed: 0,
                outcome: Err("boom, twice".into()),
            },
            RunRow {
                run: 1,
                seed: 1,
                outcome: Ok(RunOutcome {
                    point: vec![0.0, 0.0],
                    objective: -2.0,
                    evaluations: 10,
                    termination: Termination::StepFloor,
                    non_finite_evaluations: 0,
                    metrics: None,
                    success: true,
                }),
            },
        ];
        let summary = Summary::from_rows(&rows);
        assert_eq!((summary.failed, summary.successes, summary.best_run), (1, 1, Some(1)));
        let report = ExperimentReport {
            config: ExperimentConfig::new(ProblemKind::Rastrigin),
            parameter_columns: vec!["x".into(), "y".into()],
            rows,
            summary,
        };
        let csv = report.to_csv_string();
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "run,seed,x,y,objective,evaluations,termination,success,error");
        assert_eq!(data[1], "0,0,,,,,,,\"boom, twice\"");
        assert_eq!(data[2], "1,1,0,0,-2,10,step_floor,true,");
    }

    #[test]
    fn provenance_header_shows_overrides() {
        let cfg = parse_config_str("problem = rastrigin\nsearch.n = 10\nseed = 42\nruns = 1\n").unwrap();
        let csv = run_experiment(&cfg).unwrap().to_csv_string();
        assert!(csv.contains("# search.n = 10\n"));
        assert!(csv.contains("# seed = 42\n"));
    }

    #[test]
    fn designer_sizing_row() {
        let r = sizing_report(&SizingInputs::default(), &[("optimiser".into(), 185.0, 923.0)], None).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!((r.rows[0].motor_displacement - 78.0).abs() < 0.5);
        assert!((r.rows[0].pump_displacement - 17.3).abs() < 0.1);
        let text = r.to_string();
        assert!(text.contains("designer") && text.contains("optimiser"));
    }
}
