use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::hydraulics::SteadyMetrics;
use crate::problems::ProblemKind;
use crate::tabu::Termination;

use super::config::ExperimentConfig;

/// Result of one completed run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub point: Vec<f64>,
    pub objective: f64,
    pub evaluations: u64,
    pub termination: Termination,
    pub non_finite_evaluations: u64,
    pub metrics: Option<SteadyMetrics>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    /// `Err` holds the reason a run could not be carried out.
    pub outcome: std::result::Result<RunOutcome, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub failed: usize,
    pub successes: usize,
    /// Over completed runs; zero when none completed.
    pub mean_evaluations: f64,
    pub min_evaluations: u64,
    pub max_evaluations: u64,
    /// Index of the completed run with the lowest objective.
    pub best_run: Option<usize>,
}

impl Summary {
    pub fn from_rows(rows: &[RunRow]) -> Self {
        let done: Vec<(usize, &RunOutcome)> = rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|o| (r.run, o)))
            .collect();
        let evals: Vec<u64> = done.iter().map(|(_, o)| o.evaluations).collect();
        let best_run = done
            .iter()
            .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective))
            .map(|(i, _)| *i);
        Self {
            runs: rows.len(),
            failed: rows.len() - done.len(),
            successes: done.iter().filter(|(_, o)| o.success).count(),
            mean_evaluations: if evals.is_empty() {
                0.0
            } else {
                evals.iter().sum::<u64>() as f64 / evals.len() as f64
            },
            min_evaluations: evals.iter().copied().min().unwrap_or(0),
            max_evaluations: evals.iter().copied().max().unwrap_or(0),
            best_run,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// `name [unit]` for each design parameter.
    pub parameter_columns: Vec<String>,
    pub rows: Vec<RunRow>,
    pub summary: Summary,
}

fn speed_count(kind: ProblemKind) -> usize {
    match kind {
        ProblemKind::Transmission => 1,
        ProblemKind::TwoMotor => 2,
        _ => 0,
    }
}

fn metric_columns(kind: ProblemKind) -> Vec<String> {
    if !kind.is_circuit() {
        return Vec::new();
    }
    let n = speed_count(kind);
    let numbered = |base: &str, unit: &str| -> Vec<String> {
        (1..=n)
            .map(|i| if n == 1 { format!("{base} [{unit}]") } else { format!("{base}{i} [{unit}]") })
            .collect()
    };
    let mut cols = numbered("speed", "r/min");
    cols.extend(numbered("pressure_drop", "bar"));
    cols.push("relief_flow [L/min]".into());
    cols.push("pump_flow [L/min]".into());
    cols
}

fn metric_values(kind: ProblemKind, m: &SteadyMetrics) -> Vec<f64> {
    let mut v = m.speeds_rpm.clone();
    v.extend(&m.pressure_drops_bar);
    v.push(m.relief_flow_lpm);
    v.push(m.pump_flow_lpm);
    debug_assert_eq!(v.len(), metric_columns(kind).len());
    v
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl ExperimentReport {
    /// Provenance header, one row per run, then the summary as comments.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let kind = self.config.problem;
        let mut s = String::new();
        for (k, v) in self.config.entries() {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let metrics = metric_columns(kind);
        let mut header = vec!["run".to_string(), "seed".to_string()];
        header.extend(self.parameter_columns.iter().cloned());
        header.extend(["objective", "evaluations", "termination", "success"].map(String::from));
        header.extend(metrics.iter().cloned());
        header.push("error".into());
        let _ = writeln!(s, "{}", header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));

        let blanks = self.parameter_columns.len() + 4 + metrics.len();
        for row in &self.rows {
            let mut cells = vec![row.run.to_string(), row.seed.to_string()];
            match &row.outcome {
                Ok(o) => {
                    cells.extend(o.point.iter().map(f64::to_string));
                    cells.push(o.objective.to_string());
                    cells.push(o.evaluations.to_string());
                    cells.push(o.termination.as_str().to_string());
                    cells.push(o.success.to_string());
                    match &o.metrics {
                        Some(m) => cells.extend(metric_values(kind, m).iter().map(f64::to_string)),
                        None => cells.extend(std::iter::repeat_n(String::new(), metrics.len())),
                    }
                    cells.push(String::new());
                }
                Err(e) => {
                    cells.extend(std::iter::repeat_n(String::new(), blanks));
                    cells.push(quote(e));
                }
            }
            let _ = writeln!(s, "{}", cells.join(","));
        }

        let m = &self.summary;
        let _ = writeln!(s, "# summary.runs = {}", m.runs);
        let _ = writeln!(s, "# summary.failed = {}", m.failed);
        let _ = writeln!(s, "# summary.successes = {}", m.successes);
        let _ = writeln!(s, "# summary.mean_evaluations = {}", m.mean_evaluations);
        let _ = writeln!(s, "# summary.min_evaluations = {}", m.min_evaluations);
        let _ = writeln!(s, "# summary.max_evaluations = {}", m.max_evaluations);
        let best = m.best_run.map_or_else(|| "none".to_string(), |b| b.to_string());
        let _ = writeln!(s, "# summary.best_run = {best}");
        s
    }

    /// Short human-readable digest.
    pub fn summary_text(&self) -> String {
        let m = &self.summary;
        let mut s = format!(
            "{}: {} runs, {} succeeded, {} failed; evaluations mean {:.1} (min {}, max {})\n",
            self.config.problem, m.runs, m.successes, m.failed, m.mean_evaluations, m.min_evaluations, m.max_evaluations
        );
        if let Some(best) = m.best_run.and_then(|b| self.rows.get(b)) {
            if let Ok(o) = &best.outcome {
                let params: Vec<String> = self
                    .parameter_columns
                    .iter()
                    .zip(&o.point)
                    .map(|(c, v)| format!("{c} = {v}"))
                    .collect();
                let _ = writeln!(s, "best run {} (seed {}): objective {}", best.run, best.seed, o.objective);
                let _ = writeln!(s, "  {}", params.join(", "));
            }
        }
        s
    }
}
