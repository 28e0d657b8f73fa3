use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use beamsync::config::Scenario;
use beamsync::montecarlo::{
    run_cfo_experiment, run_multicell_experiment, run_sqnr_experiment, run_timing_experiment, Setup,
};
use beamsync::output;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Sqnr,
    Timing,
    Cfo,
    Multicell,
    Complexity,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Sqnr => "sqnr",
            Experiment::Timing => "timing",
            Experiment::Cfo => "cfo",
            Experiment::Multicell => "multicell",
            Experiment::Complexity => "complexity",
        }
    }
}

/// Directional frame-timing synchronization experiments.
#[derive(Debug, Parser)]
#[command(name = "beamsync", version)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Experiment to run; may be repeated.
    #[arg(long, value_enum, required = true)]
    experiment: Vec<Experiment>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
    /// Synchronization triggers counted by the complexity report.
    #[arg(long, default_value_t = 1)]
    triggers: usize,
}

fn run(cli: &Cli) -> Result<()> {
    let mut scenario = Scenario::from_path(&cli.config)?;
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if cli.workers == Some(0) {
        bail!("--workers must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .context("building the worker pool")?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;

    let setup = Setup::new(&scenario)?;
    for &exp in &cli.experiment {
        let files = pool.install(|| -> Result<Vec<PathBuf>> {
            Ok(match exp {
                Experiment::Sqnr => output::write_sqnr(&cli.out, &scenario, &run_sqnr_experiment(&setup)?)?,
                Experiment::Timing => {
                    output::write_timing(&cli.out, &scenario, "timing", &run_timing_experiment(&setup)?)?
                }
                Experiment::Cfo => output::write_timing(&cli.out, &scenario, "cfo", &run_cfo_experiment(&setup)?)?,
                Experiment::Multicell => {
                    output::write_multicell(&cli.out, &scenario, &run_multicell_experiment(&setup)?)?
                }
                Experiment::Complexity => {
                    let c = setup.complexity(cli.triggers)?;
                    println!("BS iterations (multi-beam):   {}", c.bs_iterations_multi);
                    println!("BS iterations (single-stream): {}", c.bs_iterations_single);
                    println!("UE complex multiplications:   {}", c.ue_complex_mults);
                    println!("UE complex additions:         {}", c.ue_complex_adds);
                    vec![output::write_complexity(&cli.out, &setup, cli.triggers)?]
                }
            })
        })?;
        output::write_manifest(&cli.out, &setup, exp.name())?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
