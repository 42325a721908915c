use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use su2poly_lab::plot::{emit_plot, PlotSpec, Reduce, Scale};
use su2poly_lab::{write_report, Experiment, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "su2lab", version, about = "Experiments on orthogonal polynomials of complex measures on the circle")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for random draws; overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Universality gap against the L-functional bound.
    Universality,
    /// Convergence along a lacunary degree schedule.
    Lacunary,
    /// Diagonal kernel expression against the Fejér difference.
    Fejer,
    /// Outer-function pipeline from an analytic b.
    Thm5,
    /// Layer stripping and coefficient extraction roundtrips.
    Roundtrip,
    /// Plancherel-type inequality for all pairs l < m.
    Plancherel,
    /// The closed-form family mu_r.
    Counterexample,
    /// Local parameters and zero distances.
    Local,
    /// Line chart of CSV columns as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, required = true)]
        y: Vec<String>,
        #[arg(long, value_enum, default_value_t = ScaleArg::LogLog)]
        scale: ScaleArg,
        #[arg(long, value_enum, default_value_t = ReduceArg::None)]
        reduce: ReduceArg,
        /// SVG path; defaults to the CSV path with extension `svg`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    LogLog,
    LinLog,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceArg {
    None,
    Median,
    Max,
}

fn experiment(cmd: &Command) -> Option<Experiment> {
    Some(match cmd {
        Command::Universality => Experiment::Universality,
        Command::Lacunary => Experiment::Lacunary,
        Command::Fejer => Experiment::Fejer,
        Command::Thm5 => Experiment::Thm5,
        Command::Roundtrip => Experiment::Roundtrip,
        Command::Plancherel => Experiment::Plancherel,
        Command::Counterexample => Experiment::Counterexample,
        Command::Local => Experiment::Local,
        Command::Plot { .. } => return None,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Command::Plot { csv, x, y, scale, reduce, output } = &cli.command {
        let spec = PlotSpec {
            x: x.clone(),
            y: y.clone(),
            scale: match scale {
                ScaleArg::LogLog => Scale::LogLog,
                ScaleArg::LinLog => Scale::LinLog,
            },
            reduce: match reduce {
                ReduceArg::None => Reduce::None,
                ReduceArg::Median => Reduce::Median,
                ReduceArg::Max => Reduce::Max,
            },
        };
        let out = output.clone().unwrap_or_else(|| csv.with_extension("svg"));
        emit_plot(csv, &spec, &out)?;
        println!("wrote {}", out.display());
        return Ok(ExitCode::SUCCESS);
    }
    let exp = experiment(&cli.command).expect("non-plot command");
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let report = exp.run(&cfg)?;
    for path in write_report(&report, &cli.out, &cfg.hash())? {
        println!("wrote {}", path.display());
    }
    for line in &report.summary {
        println!("{line}");
    }
    if report.violations.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(ExitCode::from(3))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
