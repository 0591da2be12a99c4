use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tabu_core::harness::{export_trace, parse_config, run_experiment, sizing_report, ExperimentConfig};
use tabu_core::hydraulics::SizingInputs;
use tabu_core::problems::ProblemKind;
use tabu_core::{Error, ParameterVector, Result};

/// Tabu search over hydraulic circuit designs and test functions.
#[derive(Parser, Debug)]
#[command(name = "tabu-fluid", version)]
struct Cli {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; run i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Number of seeded runs.
    #[arg(long, global = true)]
    runs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the Rastrigin and/or Schwefel experiments.
    Bench(ProblemArg),
    /// Optimise a circuit design over repeated seeded runs.
    Optimize(OptimizeArgs),
    /// Simulate one design and print its steady metrics and objective.
    Simulate(DesignArgs),
    /// Print the designer's transmission sizing, optionally against other designs.
    Sizing(SizingArgs),
    /// Simulate one design and write its trace as CSV.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct ProblemArg {
    /// Problem name; defaults to the config's, or to every benchmark.
    #[arg(long)]
    problem: Option<ProblemKind>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Worker threads for independent runs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[command(flatten)]
    problem: ProblemArg,
    /// Design parameters in engineering units, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    params: Vec<f64>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Output row spacing in seconds; every recorded sample if omitted.
    #[arg(long)]
    interval: Option<f64>,
    /// File name inside the output directory.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args, Debug)]
struct SizingArgs {
    /// N·m
    #[arg(long, default_value_t = 100.0)]
    load_torque: f64,
    /// r/min
    #[arg(long, default_value_t = 300.0)]
    target_speed: f64,
    /// r/min
    #[arg(long, default_value_t = 1500.0)]
    pump_speed: f64,
    /// bar
    #[arg(long, default_value_t = 85.0)]
    pressure: f64,
    #[arg(long, default_value_t = 0.95)]
    eta: f64,
    /// Design to compare, as `pump,motor` in cc/rev. Repeatable.
    #[arg(long = "compare", value_parser = parse_pair)]
    compare: Vec<(f64, f64)>,
    /// Also simulate every design and show its steady speed and relief flow.
    #[arg(long)]
    simulate: bool,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `pump,motor`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(a)?, num(b)?))
}

impl Cli {
    /// Config for `problem`, built from the config file if given, then the global flags.
    fn experiment(&self, problem: Option<ProblemKind>) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, problem) {
            (Some(path), None) => parse_config(path)?,
            (Some(path), Some(kind)) => {
                let cfg = parse_config(path)?;
                if cfg.problem != kind {
                    return Err(Error::Validation(format!(
                        "--problem {kind} conflicts with problem = {} in {}",
                        cfg.problem,
                        path.display()
                    )));
                }
                cfg
            }
            (None, Some(kind)) => ExperimentConfig::new(kind),
            (None, None) => return Err(Error::Validation("give --problem or --config".into())),
        };
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(runs) = self.runs {
            cfg.runs = runs;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }
}

fn experiment(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let report = run_experiment(cfg)?;
    let path = cli.write(&format!("{}_report.csv", cfg.problem), &report.to_csv_string())?;
    print!("{}", report.summary_text());
    println!("report written to {}", path.display());
    Ok(())
}

fn bench(cli: &Cli, args: &ProblemArg) -> Result<()> {
    let configs = if args.problem.is_none() && cli.config.is_none() {
        [ProblemKind::Rastrigin, ProblemKind::Schwefel]
            .into_iter()
            .map(|k| cli.experiment(Some(k)))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![cli.experiment(args.problem)?]
    };
    for cfg in configs {
        if cfg.problem.is_circuit() {
            return Err(Error::Validation(format!("{} is a circuit; use `optimize`", cfg.problem)));
        }
        experiment(cli, &cfg)?;
    }
    Ok(())
}

fn optimize(cli: &Cli, args: &OptimizeArgs) -> Result<()> {
    let mut cfg = cli.experiment(args.problem.problem)?;
    if !cfg.problem.is_circuit() {
        return Err(Error::Validation(format!("{} is a test function; use `bench`", cfg.problem)));
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
        cfg.validate()?;
    }
    experiment(cli, &cfg)
}

fn simulate(cli: &Cli, args: &DesignArgs) -> Result<()> {
    let cfg = cli.experiment(args.problem.problem)?;
    let problem = cfg.problem();
    let point = ParameterVector::new(args.params.clone())?;
    let a = problem.assess(&point)?;
    for (d, v) in problem.space().dims().iter().zip(point.values()) {
        println!("{} = {v} {}", d.name, d.unit);
    }
    if let Some(m) = &a.metrics {
        for (i, s) in m.speeds_rpm.iter().enumerate() {
            println!("steady speed {} = {s} r/min (ripple {})", i + 1, m.speed_ripple_rpm[i]);
        }
        for (i, p) in m.pressure_drops_bar.iter().enumerate() {
            println!("steady pressure drop {} = {p} bar", i + 1);
        }
        println!("steady relief flow = {} L/min", m.relief_flow_lpm);
        println!("pump flow = {} L/min", m.pump_flow_lpm);
    }
    if let Some(t) = a.trace.as_ref().and_then(|t| t.diverged_at) {
        println!("simulation diverged at t = {t} s");
    }
    println!("objective = {}", a.objective);
    Ok(())
}

fn export(cli: &Cli, args: &ExportArgs) -> Result<()> {
    let cfg = cli.experiment(args.design.problem.problem)?;
    let problem = cfg.problem();
    let trace = problem
        .simulate(&ParameterVector::new(args.design.params.clone())?)?
        .ok_or_else(|| Error::Validation(format!("{} has no simulation to export", cfg.problem)))?;
    fs::create_dir_all(&cli.out_dir)?;
    let name = args.output.clone().unwrap_or_else(|| format!("{}_trace.csv", cfg.problem));
    let path = cli.out_dir.join(Path::new(&name));
    let rows = export_trace(&trace, &path, args.interval)?;
    println!("{rows} rows written to {}", path.display());
    Ok(())
}

fn sizing(cli: &Cli, args: &SizingArgs) -> Result<()> {
    let inputs = SizingInputs {
        load_torque: args.load_torque,
        target_speed: args.target_speed,
        pump_speed: args.pump_speed,
        assumed_pressure: args.pressure,
        eta_mm: args.eta,
        eta_vm: args.eta,
        eta_vp: args.eta,
    };
    let candidates: Vec<(String, f64, f64)> = args
        .compare
        .iter()
        .enumerate()
        .map(|(i, &(p, m))| (format!("candidate {}", i + 1), p, m))
        .collect();
    let constants = if args.simulate {
        let cfg = match &cli.config {
            Some(path) => parse_config(path)?,
            None => ExperimentConfig::new(ProblemKind::Transmission),
        };
        Some(cfg.constants)
    } else {
        None
    };
    print!("{}", sizing_report(&inputs, &candidates, constants.as_ref())?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bench(a) => bench(&cli, a),
        Command::Optimize(a) => optimize(&cli, a),
        Command::Simulate(a) => simulate(&cli, a),
        Command::Sizing(a) => sizing(&cli, a),
        Command::Export(a) => export(&cli, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
