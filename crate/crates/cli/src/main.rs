use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bellctx_cli::{
    run, CliError, CliResult, Command, ExperimentConfig, ModelSpec, OutputFormat, SweepQuantity,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bellctx",
    version,
    about = "EL / PC / factorization experiments for Bell, EPR and GHZ scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Four correlations, S, and both bounds.
    Chsh(Common),
    /// Parity table, contradiction flag and conditional ladder.
    Ghz(Common),
    /// EL, PC and factorization reports.
    Conditions(Common),
    /// Light-cone geometry, causality audit and availability table.
    Spacetime {
        #[command(flatten)]
        common: Common,
        /// Distance between the source and each setting event.
        #[arg(long, default_value_t = bellctx_cli::run::DEFAULT_SEPARATION)]
        separation: f64,
        #[arg(long, default_value = bellctx_cli::run::DEFAULT_DESCRIPTOR)]
        descriptor: String,
    },
    /// CSV of |S| (or PC violation) against angle.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = bellctx_cli::run::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, value_enum, default_value_t)]
        quantity: SweepQuantity,
    },
}

#[derive(Args)]
struct Common {
    /// quantum-singlet | quantum-ghz | lhv:<file> | deterministic:<spec>
    #[arg(long)]
    model: Option<ModelSpec>,
    /// Radians unless --degrees. chsh: x1 x2 y1 y2.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    angles: Vec<f64>,
    #[arg(long)]
    degrees: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 0 = exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, value_enum, default_value_t)]
    output: OutputFormat,
    #[arg(long, default_value_t = bellctx::tolerance::CONDITION_DEFAULT)]
    tolerance: f64,
    /// Write `<command>.<ext>` here instead of stdout.
    #[arg(long, env = "BELLCTX_OUTPUT_DIR")]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn config(
        self,
        command: Command,
        default_model: ModelSpec,
    ) -> (ExperimentConfig, Option<PathBuf>) {
        let mut c = ExperimentConfig::new(command, self.model.unwrap_or(default_model));
        c.angles = if self.degrees {
            self.angles.iter().map(|a| a.to_radians()).collect()
        } else {
            self.angles
        };
        c.seed = self.seed;
        c.shots = self.shots;
        c.output = self.output;
        c.tolerance = self.tolerance;
        (c, self.out_dir)
    }
}

fn resolve(sub: Sub) -> (ExperimentConfig, Option<PathBuf>) {
    match sub {
        Sub::Chsh(c) => c.config(Command::Chsh, ModelSpec::QuantumSinglet),
        Sub::Ghz(c) => c.config(Command::Ghz, ModelSpec::QuantumGhz),
        Sub::Conditions(c) => c.config(Command::Conditions, ModelSpec::QuantumSinglet),
        Sub::Spacetime {
            common,
            separation,
            descriptor,
        } => {
            let (mut c, dir) = common.config(Command::Spacetime, ModelSpec::QuantumSinglet);
            c.separation = Some(separation);
            c.descriptor = Some(descriptor);
            (c, dir)
        }
        Sub::Sweep {
            common,
            steps,
            quantity,
        } => {
            let (mut c, dir) = common.config(Command::Sweep, ModelSpec::QuantumSinglet);
            c.steps = Some(steps);
            c.quantity = Some(quantity);
            (c, dir)
        }
    }
}

fn execute(config: &ExperimentConfig, out_dir: Option<PathBuf>) -> CliResult<()> {
    let report = run(config)?;
    let body = report.render(config.output);
    match out_dir {
        Some(dir) => {
            let io = |source| CliError::Io {
                path: dir.clone(),
                source,
            };
            std::fs::create_dir_all(&dir).map_err(io)?;
            let path = dir.join(format!("{}.{}", config.command, config.output.extension()));
            std::fs::write(&path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    match report.breach {
        Some(b) => Err(CliError::Invariant(b)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (config, out_dir) = resolve(cli.command);
    match execute(&config, out_dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
