use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mosoo_core::optimizer::HMaxPolicy;
use mosoo_core::theory::HolderForm;
use mosoo_core::SplitPolicy;
use mosoo_cli::commands::{self, FrontSource, Manifest};
use mosoo_cli::{Algorithm, BoundsConfig, CliError, CliResult, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "mosoo", version, about = "Optimistic multi-objective optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an optimizer and write its artifacts to a directory.
    Run(RunArgs),
    /// Compute indicators of an approximation set.
    Indicators(IndicatorArgs),
    /// List the registered problems.
    ListProblems,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Mosoo,
    Soo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitArg {
    Sequential,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    CellDiameter,
    Verbatim,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Problem id, see `list-problems`.
    #[arg(long, required_unless_present = "manifest")]
    problem: Option<String>,
    #[arg(long, value_enum, default_value = "mosoo")]
    algo: AlgoArg,
    /// Partition factor.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Exponent p of the depth cap floor(t^p).
    #[arg(long, default_value_t = 0.5, conflicts_with = "hmax_depth")]
    hmax_p: f64,
    /// Use a constant depth cap instead of floor(t^p).
    #[arg(long)]
    hmax_depth: Option<usize>,
    #[arg(long, value_enum, default_value = "sequential")]
    split: SplitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Number of uniform samples for the reference front.
    #[arg(long, default_value_t = 100_000)]
    front_samples: usize,
    /// Seed of the reference-front sampler; defaults to `--seed`.
    #[arg(long)]
    front_seed: Option<u64>,
    /// Also write the bound curve (holder problems only).
    #[arg(long)]
    bounds: bool,
    #[arg(long, value_enum, default_value = "cell-diameter", requires = "bounds")]
    bound_form: FormArg,
    /// Repeat the run described by a manifest; other run flags are ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> CliResult<RunConfig> {
        if let Some(path) = &self.manifest {
            return Ok(Manifest::load(path)?.config);
        }
        let hmax = match self.hmax_depth {
            Some(depth) => HMaxPolicy::Constant { depth },
            None => HMaxPolicy::power(self.hmax_p).map_err(|e| CliError::Config(e.to_string()))?,
        };
        Ok(RunConfig {
            problem: self.problem.clone().unwrap_or_default(),
            algorithm: match self.algo {
                AlgoArg::Mosoo => Algorithm::Mosoo,
                AlgoArg::Soo => Algorithm::Soo,
            },
            k: self.k,
            budget: self.budget,
            hmax,
            split: match self.split {
                SplitArg::Sequential => SplitPolicy::Sequential,
                SplitArg::Random => SplitPolicy::Random,
            },
            seed: self.seed,
            front_samples: self.front_samples,
            front_seed: self.front_seed.unwrap_or(self.seed),
            bounds: self.bounds.then(|| BoundsConfig {
                form: match self.bound_form {
                    FormArg::CellDiameter => HolderForm::CellDiameter,
                    FormArg::Verbatim => HolderForm::Verbatim,
                },
                ..Default::default()
            }),
        })
    }
}

#[derive(Debug, Args)]
struct IndicatorArgs {
    /// CSV file holding the approximation set.
    #[arg(long)]
    set: PathBuf,
    /// CSV file holding the reference front.
    #[arg(long, conflicts_with = "problem", required_unless_present = "problem")]
    front: Option<PathBuf>,
    /// Sample the reference front of this problem instead.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    front_samples: usize,
    #[arg(long, default_value_t = 0)]
    front_seed: u64,
}

fn execute(cli: Cli) -> CliResult<()> {
    let stdout = std::io::stdout();
    let to_io = |e| CliError::io("<stdout>", e);
    match cli.command {
        Command::Run(args) => {
            let config = args.config()?;
            let manifest = commands::run(&config, &args.out)?;
            println!(
                "{} evaluations, {} iterations, archive of {} written to {}",
                manifest.evaluations,
                manifest.iterations,
                manifest.archive_size,
                args.out.display()
            );
            Ok(())
        }
        Command::Indicators(args) => {
            let source = match (args.front, args.problem) {
                (Some(path), _) => FrontSource::File(path),
                (None, Some(id)) => FrontSource::Problem {
                    id,
                    samples: args.front_samples,
                    seed: args.front_seed,
                },
                (None, None) => return Err(CliError::Config("either --front or --problem is required".into())),
            };
            let values = commands::indicators(&args.set, &source)?;
            commands::print_indicators(&values, stdout.lock()).map_err(to_io)
        }
        Command::ListProblems => commands::list_problems(stdout.lock()).map_err(to_io),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
