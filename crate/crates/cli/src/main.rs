use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rao_core::generators::{LengthDistribution, ProfileShape, RandomParams};
use rao_lab::commands::{
    cmd_bound_eval, cmd_bound_grid, cmd_bound_maximize, cmd_generate, cmd_run, emit,
    resolve_workers,
};
use rao_lab::config::parse_config;
use rao_lab::{CliError, GeneratorSpec};

#[derive(Parser)]
#[command(
    name = "rao-lab",
    version,
    about = "Simulation laboratory for online reading under a time budget"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file and report its accuracy and validity.
    Generate(GenerateArgs),
    /// Run an experiment sweep from a config file and emit a results CSV.
    Run(RunArgs),
    /// Evaluate, maximize, or sample the competitive-ratio bound.
    Bound {
        #[command(subcommand)]
        mode: BoundMode,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance family: lemma3, lemma4, lemma5, or random.
    #[arg(long)]
    family: String,
    /// Side length l (lemma3); the instance has l^2 articles.
    #[arg(long)]
    l: Option<u64>,
    /// Article count (lemma4, lemma5, random).
    #[arg(long)]
    n: Option<usize>,
    /// Accuracy C of the lemma5 family.
    #[arg(long)]
    c_acc: Option<u64>,
    /// Time budget T (random).
    #[arg(long)]
    budget: Option<u64>,
    /// Smallest hint (random).
    #[arg(long)]
    hint_min: Option<u64>,
    /// Largest hint (random).
    #[arg(long)]
    hint_max: Option<u64>,
    /// Fixed article length (random); exclusive with --length-min/--length-max.
    #[arg(long)]
    length: Option<u64>,
    /// Smallest article length (random).
    #[arg(long)]
    length_min: Option<u64>,
    /// Largest article length (random).
    #[arg(long)]
    length_max: Option<u64>,
    /// Profile shape (random): constant, non_increasing_steps, or
    /// non_increasing_geometric.
    #[arg(long, default_value = "constant")]
    shape: String,
    /// Lower end of the per-article accuracy target range (random).
    #[arg(long)]
    acc_min: Option<f64>,
    /// Upper end of the per-article accuracy target range (random).
    #[arg(long)]
    acc_max: Option<f64>,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's default trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to the config, then RAO_LAB_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum BoundMode {
    /// Evaluate the bound at one point; arguments accept decimals or p/q.
    Eval {
        g: String,
        beta: String,
        gamma: String,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the parameters minimizing the competitive ratio.
    Maximize {
        /// Restrict the search to one value of g.
        #[arg(long)]
        fixed_g: Option<String>,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump objective samples over the feasible grid as CSV.
    Grid {
        #[arg(long, default_value_t = 0.02)]
        g_step: f64,
        #[arg(long, default_value_t = 0.05)]
        beta_step: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma_step: f64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => {
            let spec = generator_spec(&args)?;
            let report = cmd_generate(&spec, &args.out)?;
            print!("{report}");
            Ok(())
        }
        Command::Run(args) => {
            let text = std::fs::read_to_string(&args.config)
                .map_err(|e| CliError::Validation(format!("{}: {e}", args.config.display())))?;
            let mut config = parse_config(&text)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            if let Some(trials) = args.trials {
                if trials == 0 {
                    return Err(CliError::Validation(
                        "--trials: must be at least 1".to_string(),
                    ));
                }
                config.trials = trials;
            }
            let workers = resolve_workers(args.workers, config.workers)?;
            let csv = cmd_run(&config, workers)?;
            emit(&csv, args.out.as_deref())
        }
        Command::Bound { mode } => match mode {
            BoundMode::Eval { g, beta, gamma, out } => {
                let json = cmd_bound_eval(&g, &beta, &gamma)?;
                emit(json.as_bytes(), out.as_deref())
            }
            BoundMode::Maximize { fixed_g, out } => {
                let json = cmd_bound_maximize(fixed_g.as_deref())?;
                emit(json.as_bytes(), out.as_deref())
            }
            BoundMode::Grid {
                g_step,
                beta_step,
                gamma_step,
                out,
            } => {
                let csv = cmd_bound_grid(g_step, beta_step, gamma_step)?;
                emit(&csv, out.as_deref())
            }
        },
    }
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Validation(format!("{flag} is required for --family {family}"))
    })
}

fn generator_spec(args: &GenerateArgs) -> Result<GeneratorSpec, CliError> {
    let seed = args.seed;
    match args.family.as_str() {
        "lemma3" => Ok(GeneratorSpec::Lemma3 {
            l: require(args.l, "--l", "lemma3")?,
            seed,
        }),
        "lemma4" => Ok(GeneratorSpec::Lemma4 {
            n: require(args.n, "--n", "lemma4")?,
            seed,
        }),
        "lemma5" => Ok(GeneratorSpec::Lemma5 {
            n: require(args.n, "--n", "lemma5")?,
            c_acc: require(args.c_acc, "--c-acc", "lemma5")?,
            seed,
        }),
        "random" => {
            let length = match (args.length, args.length_min, args.length_max) {
                (Some(l), None, None) => LengthDistribution::Fixed(l),
                (None, Some(min), Some(max)) => LengthDistribution::Uniform { min, max },
                (None, None, None) => {
                    return Err(CliError::Validation(
                        "--length or --length-min/--length-max is required for --family random"
                            .to_string(),
                    ))
                }
                _ => {
                    return Err(CliError::Validation(
                        "use either --length or both --length-min and --length-max".to_string(),
                    ))
                }
            };
            let shape: ProfileShape =
                serde_json::from_value(serde_json::Value::String(args.shape.clone())).map_err(
                    |_| {
                        CliError::Validation(format!(
                            "--shape: unknown shape {:?} (expected constant, \
                             non_increasing_steps, or non_increasing_geometric)",
                            args.shape
                        ))
                    },
                )?;
            let acc_min = args.acc_min.unwrap_or(1.0);
            let acc_max = args.acc_max.unwrap_or(acc_min);
            Ok(GeneratorSpec::Random {
                params: RandomParams {
                    n: require(args.n, "--n", "random")?,
                    budget: require(args.budget, "--budget", "random")?,
                    hint_min: require(args.hint_min, "--hint-min", "random")?,
                    hint_max: require(args.hint_max, "--hint-max", "random")?,
                    length,
                    shape,
                    accuracy: [acc_min, acc_max],
                },
                seed,
            })
        }
        other => Err(CliError::Validation(format!(
            "--family: unknown family {other:?} (expected lemma3, lemma4, lemma5, or random)"
        ))),
    }
}
