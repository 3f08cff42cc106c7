mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, PoolConfig, RunConfig};

#[derive(Parser)]
#[command(name = "ggavqe", version, about = "Greedy gradient-free adaptive VQE")]
struct Cli {
    /// Cap on worker threads used for screening.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a driver and write trace.json, trace.csv and ansatz.txt.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory; defaults to $GGAVQE_OUTPUT_DIR or ./ggavqe-out.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reconstructed and exact landscape of one generator as CSV.
    Landscape {
        config: PathBuf,
        /// Generator id or label.
        #[arg(long)]
        generator: String,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Evaluate around this ansatz instead of the initial state.
        #[arg(long)]
        ansatz: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact ground energy, and an ansatz's energy and fidelity.
    GroundTruth {
        config: PathBuf,
        #[arg(long)]
        ansatz: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Operator pools.
    #[command(subcommand)]
    Pool(PoolCommand),
    /// Hamiltonians.
    #[command(subcommand)]
    Ham(HamCommand),
}

#[derive(Subcommand)]
enum PoolCommand {
    /// List id, label, class and term count of each generator.
    Describe {
        /// Take the pool from a run config.
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        kind: Option<String>,
        #[arg(long, requires = "kind")]
        qubits: Option<usize>,
        /// Print the pool text format instead.
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Subcommand)]
enum HamCommand {
    /// Print a Hamiltonian in Pauli text format.
    Build {
        /// Take the problem from a run config.
        config: Option<PathBuf>,
        /// Transverse-field Ising chain: qubit count.
        #[arg(long, conflicts_with = "config", requires_all = ["h", "j"])]
        ising: Option<usize>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        j: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Jordan-Wigner map of a fermionic integral file.
    Jw {
        integrals: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long, value_parser = ["exact", "sampled"])]
    backend: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override any config value, e.g. `--set pool.kind=qeb`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn assignments(&self, output: Option<&PathBuf>) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(b) = &self.backend {
            out.push(format!("backend.mode=\"{b}\""));
        }
        if let Some(s) = self.shots {
            out.push(format!("backend.shots={s}"));
        }
        if let Some(s) = self.seed {
            out.push(format!("backend.seed={s}"));
        }
        if let Some(o) = output {
            out.push(format!("output.dir={}", toml::Value::String(o.display().to_string())));
        }
        out.extend(self.set.iter().cloned());
        out
    }

    fn load(&self, path: &std::path::Path, output: Option<&PathBuf>) -> Result<RunConfig, ConfigError> {
        RunConfig::load(path, &self.assignments(output))
    }
}

enum Failure {
    Config(ConfigError),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<ConfigError>() {
            Ok(c) => Failure::Config(c),
            Err(e) => Failure::Runtime(e),
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::new("--threads", "must be positive").into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(anyhow::Error::from)?;
    }
    match cli.command {
        Command::Run { config, overrides, output } => {
            let cfg = overrides.load(&config, output.as_ref())?;
            commands::run(&cfg)?;
        }
        Command::Landscape { config, generator, points, ansatz, overrides, output } => {
            let cfg = overrides.load(&config, None)?;
            commands::landscape(&cfg, &generator, points, ansatz.as_deref(), output.as_deref())?;
        }
        Command::GroundTruth { config, ansatz, overrides, output } => {
            let cfg = overrides.load(&config, None)?;
            commands::ground_truth(&cfg, ansatz.as_deref(), output.as_deref())?;
        }
        Command::Pool(PoolCommand::Describe { config, kind, qubits, text, overrides }) => {
            let pool = match (config, kind) {
                (Some(path), _) => {
                    let cfg = overrides.load(&path, None)?;
                    config::Problem::build(&cfg)?.pool
                }
                (None, Some(kind)) => {
                    let n = qubits.ok_or_else(|| ConfigError::new("--qubits", "required with --kind"))?;
                    let pc = PoolConfig { kind, spin_filter: None, pairs: None, path: None };
                    config::build_pool(&pc, n)?
                }
                (None, None) => return Err(ConfigError::new("", "give a config file or --kind and --qubits").into()),
            };
            print!("{}", if text { pool.to_text() } else { pool.describe() });
        }
        Command::Ham(HamCommand::Build { config, ising, h, j, output, overrides }) => {
            let text = match (config, ising) {
                (Some(path), _) => {
                    let cfg = overrides.load(&path, None)?;
                    let problem = config::Problem::build(&cfg)?;
                    problem
                        .hamiltonian
                        .ok_or_else(|| ConfigError::new("problem.kind", "no Hamiltonian configured"))?
                        .to_text()
                }
                (None, Some(n)) => commands::ising_text(n, h.unwrap_or_default(), j.unwrap_or_default())?,
                (None, None) => return Err(ConfigError::new("", "give a config file or --ising N --h H --j J").into()),
            };
            commands::emit(output.as_deref(), &text)?;
        }
        Command::Ham(HamCommand::Jw { integrals, output }) => {
            commands::emit(output.as_deref(), &commands::jw_text(&integrals)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
