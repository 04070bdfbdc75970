use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use newsgraph::encoders::ModelKind;
use newsgraph::eval::{Directions, UseCase};
use newsgraph::Error;
use newsgraph_cli::{
    cmd_eval, cmd_generate, cmd_gradcheck, cmd_stats, cmd_train, exit_code, with_manifest, RunConfig,
    GRADCHECK_TOLERANCE, SNAPSHOT_DIR,
};

#[derive(Parser)]
#[command(name = "newsgraph", version, about = "Link prediction on scientific-news knowledge graphs")]
struct Cli {
    /// Worker threads; 1 runs everything serially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph (edge list and attributes).
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides synth.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print node, edge and degree statistics of the configured graph.
    Stats {
        #[arg(long)]
        config: PathBuf,
    },
    /// Train the configured model and write a parameter snapshot.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides train.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rank held-out triples with a trained snapshot.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out>/snapshot`.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        /// Overrides train.seed; must match the training run.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        use_case: Option<UseCaseArg>,
        #[arg(long, value_enum)]
        directions: Option<DirectionsArg>,
    },
    /// Compare analytic and finite-difference gradients on a small fixture.
    Gradcheck {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Rgcn,
    Hetgnn,
    Hgt,
}

#[derive(Clone, Copy, ValueEnum)]
enum UseCaseArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionsArg {
    Tail,
    Both,
}

fn load(config: Option<&Path>) -> Result<RunConfig, Error> {
    match config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Generate { config, out, seed } => {
            let mut cfg = load(config.as_deref())?;
            if let Some(s) = seed {
                cfg.synth.seed = s;
            }
            let o = with_manifest("generate", &cfg, &out, || cmd_generate(&cfg, &out))?;
            print!("{}", o.report);
        }
        Command::Stats { config } => {
            let cfg = load(Some(&config))?;
            print!("{}", cmd_stats(&cfg)?.report);
        }
        Command::Train { config, out, seed } => {
            let mut cfg = load(Some(&config))?;
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            let o = with_manifest("train", &cfg, &out, || cmd_train(&cfg, &out))?;
            print!("{}", o.report);
        }
        Command::Eval {
            config,
            out,
            snapshot,
            seed,
            use_case,
            directions,
        } => {
            let mut cfg = load(Some(&config))?;
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            match use_case {
                Some(UseCaseArg::A) => cfg.eval.use_cases = vec![UseCase::A],
                Some(UseCaseArg::B) => cfg.eval.use_cases = vec![UseCase::B],
                Some(UseCaseArg::Both) => cfg.eval.use_cases = vec![UseCase::A, UseCase::B],
                None => {}
            }
            match directions {
                Some(DirectionsArg::Tail) => cfg.eval.directions = Directions::TailOnly,
                Some(DirectionsArg::Both) => cfg.eval.directions = Directions::Both,
                None => {}
            }
            let snapshot = snapshot.unwrap_or_else(|| out.join(SNAPSHOT_DIR));
            let o = with_manifest("eval", &cfg, &out, || cmd_eval(&cfg, &snapshot, &out))?;
            print!("{}", o.report);
        }
        Command::Gradcheck { model, dim, seed } => {
            let kind = match model {
                ModelArg::Rgcn => ModelKind::Rgcn,
                ModelArg::Hetgnn => ModelKind::HetGnn,
                ModelArg::Hgt => ModelKind::Hgt,
            };
            let r = cmd_gradcheck(kind, dim, seed)?;
            println!("model {kind} dim {dim} checked {} max_rel_error {:.3e}", r.checked, r.max_rel_error);
            if let Some((name, idx, a, n)) = &r.worst {
                println!("worst {name}[{idx}] analytic {a:.6e} numeric {n:.6e}");
            }
            if !(r.max_rel_error < GRADCHECK_TOLERANCE) {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Debug } else { log::LevelFilter::Warn })
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
