use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use symwave_cli::{
    run_experiment, run_validation, CliError, ExperimentConfig, ExperimentKind, FigureId,
};

#[derive(Parser)]
#[command(
    name = "symwave",
    version,
    about = "Transmission experiments for layered random media and waveguides"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file, `key = value` per line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ensemble seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative series tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sample count override (Monte Carlo realizations, ensemble draws).
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission moments over the depth grid.
    Moments,
    /// Symmetric and independent mean intensity series.
    Series,
    /// Monte Carlo mean intensity against the series value.
    Mc,
    /// One of the reference curve sets.
    Figure {
        #[arg(value_enum)]
        id: FigureArg,
    },
    /// Synthetic multimode ensemble sweep over barrier strength.
    Waveguide,
    /// Run the validation suite; nonzero exit if any criterion fails.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Comp1,
    Comp2,
    Comp3,
}

impl From<FigureArg> for FigureId {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Comp1 => FigureId::Comp1,
            FigureArg::Comp2 => FigureId::Comp2,
            FigureArg::Comp3 => FigureId::Comp3,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let kind = match &cli.command {
        Command::Moments => ExperimentKind::Moments,
        Command::Series => ExperimentKind::LayeredSeries,
        Command::Mc => ExperimentKind::LayeredMc,
        Command::Figure { id } => ExperimentKind::Figure((*id).into()),
        Command::Waveguide => ExperimentKind::WaveguideSuite,
        Command::Validate => ExperimentKind::Validate,
    };
    let mut cfg = ExperimentConfig::for_kind(kind);
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.rel_tol = tol;
    }
    if let Some(samples) = cli.samples {
        cfg.n_samples = samples;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;

    let started = Instant::now();
    let (mut table, failed) = match kind {
        ExperimentKind::Validate => {
            let (table, all_pass) = run_validation(&cfg)?;
            let failed = if all_pass {
                None
            } else {
                Some(CliError::Validation(
                    "one or more criteria failed; see the emitted rows".into(),
                ))
            };
            (table, failed)
        }
        _ => (run_experiment(&cfg)?, None),
    };
    table.standard_metadata(&cfg);
    table.wall_time = Some(started.elapsed());

    let csv = table.to_csv()?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    eprintln!("wall time {:.3}s", started.elapsed().as_secs_f64());

    match failed {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
