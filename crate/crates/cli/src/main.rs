use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use singlab::harness::{self, Experiment, ExperimentConfig, HarnessError};
use singlab::rank::{certify_graph, eac_event, IntMatrix};
use singlab::report::Envelope;
use singlab::{ChainConfig, Digraph, Frac, Method, SampleSource};

#[derive(Parser)]
#[command(name = "singlab", version, about = "Random regular digraph singularity laboratory")]
struct Cli {
    /// Experiment config (JSON); flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "SINGLAB_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw graphs from M_{n,d} and print them in text form.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long)]
        thinning: Option<u64>,
    },
    /// Decide singularity of a graph read from a file (or stdin) in text form.
    Rank {
        /// Graph file; `-` or absent reads stdin.
        file: Option<PathBuf>,
        /// `p` of the almost-constant null vector check.
        #[arg(long, default_value = "1/3")]
        p: Frac,
    },
    /// Singularity frequency sweep.
    Psing(GridArgs),
    /// Structural property suite.
    Properties(GridArgs),
    /// Anti-concentration of δ^J.
    Anticonc(GridArgs),
    /// Exact Littlewood–Offord checks.
    Lo(GridArgs),
    /// Shuffle-class experiment.
    Shuffle(GridArgs),
    /// Exhaustive enumeration of tiny M_{n,d}.
    Enumerate(GridArgs),
    /// Re-run a recorded experiment and compare its rows.
    Replay { manifest: PathBuf },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Configuration,
    Switch,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Configuration => Method::Configuration,
            MethodArg::Switch => Method::Switch,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid points `n:d`, comma separated (e.g. `4:2,5:2`).
    #[arg(long, value_delimiter = ',', value_parser = parse_point)]
    grid: Vec<(usize, usize)>,
    /// Samples per grid point.
    #[arg(long)]
    samples: Option<u64>,
    /// Experiment parameter block as inline JSON.
    #[arg(long)]
    params: Option<String>,
}

fn parse_point(s: &str) -> Result<(usize, usize), String> {
    let (n, d) = s.split_once(':').ok_or_else(|| format!("expected n:d, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(n)?, p(d)?))
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1)
}

fn read_path(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Config from `--config` (if any) with command-line overrides applied.
fn build_config(cli: &Cli, experiment: Experiment, args: &GridArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg: ExperimentConfig = serde_json::from_str(&read_path(path)?)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            if cfg.experiment != experiment {
                return Err(HarnessError::Config(format!(
                    "config is for {}, not {}",
                    cfg.experiment.name(),
                    experiment.name()
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(experiment, Vec::new(), 1000, 0),
    };
    if !args.grid.is_empty() {
        cfg.grid = args.grid.clone();
    }
    if let Some(s) = args.samples {
        cfg.n_samples = s;
    }
    if let Some(p) = &args.params {
        cfg.params = serde_json::from_str(p).map_err(|e| HarnessError::Config(format!("--params: {e}")))?;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_grid(cli: &Cli, experiment: Experiment, args: &GridArgs) -> Result<(), HarnessError> {
    let cfg = build_config(cli, experiment, args)?;
    let run = harness::run_experiment(&cfg, workers(cli))?;
    match &cfg.output_dir {
        Some(dir) => {
            let manifest = harness::write_run(&run, dir)?;
            println!("{}", manifest.display());
        }
        None => print!("{}", run.csv),
    }
    Ok(())
}

fn emit(cli: &Cli, name: &str, body: &str) -> Result<(), HarnessError> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.clone(), source })?;
            let path = dir.join(name);
            fs::write(&path, body).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            println!("{}", path.display());
        }
        None => println!("{body}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Sample { n, d, count, method, burn_in, thinning } => {
            let started = Instant::now();
            let seed = cli.seed.unwrap_or(0);
            let cfg = ChainConfig {
                burn_in_steps: *burn_in,
                thinning: *thinning,
                seed,
                method: (*method).into(),
                ..ChainConfig::default()
            };
            let source = SampleSource::new(*n, *d, &cfg).map_err(|e| HarnessError::Infeasible(e.to_string()))?;
            let graphs: Vec<String> = (0..*count)
                .map(|k| source.sample(seed, k).map(|g| g.to_text()))
                .collect::<Result<_, _>>()
                .map_err(|e| HarnessError::Infeasible(e.to_string()))?;
            if cli.out.is_some() {
                let params = json!({"n": n, "d": d, "method": format!("{:?}", source.method()).to_lowercase()});
                let env = Envelope::new("sample", params, seed, *count, graphs, started);
                emit(cli, "sample.json", &env.to_json())
            } else {
                print!("{}", graphs.join("\n"));
                Ok(())
            }
        }
        Command::Rank { file, p } => {
            let started = Instant::now();
            let text = match file.as_deref() {
                Some(path) if path != Path::new("-") => read_path(path)?,
                _ => {
                    let mut s = String::new();
                    std::io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|source| HarnessError::Io { path: "<stdin>".into(), source })?;
                    s
                }
            };
            let g = Digraph::from_text(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
            let cert = certify_graph(&g);
            let eac = eac_event(&IntMatrix::from(&g), *p, cli.seed.unwrap_or(0))
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let params = json!({"n": g.n(), "d": g.d(), "p": p});
            let env = Envelope::new("rank", params, cli.seed.unwrap_or(0), 1, json!({"certificate": cert, "eac": eac}), started);
            emit(cli, "rank.json", &env.to_json())
        }
        Command::Psing(a) => run_grid(cli, Experiment::PsingSweep, a),
        Command::Properties(a) => run_grid(cli, Experiment::PropertySuite, a),
        Command::Anticonc(a) => run_grid(cli, Experiment::Anticonc, a),
        Command::Lo(a) => run_grid(cli, Experiment::LoSuite, a),
        Command::Shuffle(a) => run_grid(cli, Experiment::ShuffleSuite, a),
        Command::Enumerate(a) => run_grid(cli, Experiment::Enumerate, a),
        Command::Replay { manifest } => {
            let (report, run) = harness::replay(manifest, workers(cli))?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(dir) = &cli.out {
                harness::write_run(&run, dir)?;
            }
            println!("replay ok: {} rows, sha256 {}", report.rows, report.rows_sha256);
            Ok(())
        }
    }
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
