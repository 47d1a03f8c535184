use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qka_cli::{CliError, ExperimentConfig, Preset, Run};

#[derive(Parser)]
#[command(name = "qka", about = "Quantum-kernel phase recognition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Built-in config: xxz, spt, bond-xxz or ptdist.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, default_value = "qka-out")]
    out: PathBuf,

    /// Ground-state cache directory (defaults to OUT/cache).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve and cache the ground state of every configured point.
    Groundstate,
    /// Evaluate the observable and labels on cached states.
    Label,
    /// Train the kernel Alphatron on the training labels.
    Train,
    /// Predict and classify the test points.
    Predict,
    /// Porter-Thomas distance sweep over the test points.
    Ptdist,
    /// Classical-shadow kernel PCA baseline.
    ShadowBaseline,
    /// Collect every stage metric into summary.csv.
    Report,
    /// Print the resolved config as JSON.
    ShowConfig,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => return Err(CliError::config("use either --config or --preset")),
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => name.parse::<Preset>()?.config(),
        (None, None) => return Err(CliError::config("one of --config or --preset is required")),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    let config = load_config(cli)?;
    if let Command::ShowConfig = cli.command {
        println!("{}", config.to_json());
        return Ok(());
    }
    let mut run = Run::new(config, &cli.out)?;
    if let Some(dir) = &cli.cache {
        run = run.with_cache(dir);
    }
    match cli.command {
        Command::Groundstate => {
            let s = run.groundstate()?;
            println!("solved {}, cached {}, failed {}", s.solved, s.cached, s.failed);
        }
        Command::Label => println!("labelled {} points", run.label()?.len()),
        Command::Train => {
            let s = run.train()?;
            println!(
                "selected iteration {} of {}, training risk {:.6}, validation risk {:.6}",
                s.model.selected_iteration, s.model.iterations, s.training_risk, s.validation_risk
            );
        }
        Command::Predict => {
            let s = run.predict()?;
            println!("test risk {:.6}, success rate {:.4}", s.test_risk, s.success_rate);
        }
        Command::Ptdist => {
            for r in run.ptdist()? {
                println!("{:?} {:.6} {}", r.point, r.distance, r.hard);
            }
        }
        Command::ShadowBaseline => {
            let s = run.shadow_baseline()?;
            println!("baseline success rate {:.4}, silhouette {:.4}", s.accuracy, s.silhouette);
        }
        Command::Report => {
            for (stage, metric, value) in run.report()? {
                println!("{stage:16} {metric:24} {value}");
            }
        }
        Command::ShowConfig => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
