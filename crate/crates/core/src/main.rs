use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use largeclaims::harness::{self, ExperimentConfig, ReportRow};
use largeclaims::limitlaws::{extremal_moments, uncorrected_moments};
use largeclaims::norming::norming_constants;
use largeclaims::{Error, MarginalModel, Result};

#[derive(Parser)]
#[command(
    name = "largeclaims",
    version,
    about = "Monte Carlo lab for bivariate largest-claims treaties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-horizon replicate rows.
    Simulate(RunArgs),
    /// Draws from the limit law.
    Limit {
        #[command(flatten)]
        run: RunArgs,
        /// Number of draws; defaults to `limit_draws` from the config.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Replicates, limit draws and the per-horizon summary.
    Converge(RunArgs),
    /// Normalizing constants for one marginal at one horizon.
    Norming {
        #[arg(long)]
        family: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        shift: Option<f64>,
    },
    /// Mean and variance of the i-th Gumbel extremal component.
    Moments {
        #[arg(long)]
        i: usize,
        /// Print the uncorrected closed forms instead.
        #[arg(long)]
        uncorrected: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, alias = "spec")]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| Error::Io {
            path: self.config.clone(),
            source: e,
        })?;
        let mut cfg = harness::parse_config(&text)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let out = self.out.clone().or_else(|| cfg.output.clone());
        Ok((cfg, out))
    }
}

fn emit_rows(rows: &[ReportRow], out: Option<&Path>) -> Result<()> {
    let text = harness::format_rows(rows);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => write_stdout(&text),
    }
}

fn write_stdout(text: &str) -> Result<()> {
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })
}

fn marginal(
    family: &str,
    alpha: Option<f64>,
    omega: Option<f64>,
    shift: Option<f64>,
) -> Result<MarginalModel> {
    let need = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| Error::Validation {
            key: key.into(),
            message: format!("required for family `{family}`"),
        })
    };
    let model = match family {
        "exponential" => MarginalModel::Exponential,
        "pareto" => MarginalModel::Pareto {
            alpha: need(alpha, "alpha")?,
        },
        "bounded_power" => MarginalModel::BoundedPower {
            alpha: need(alpha, "alpha")?,
            omega: need(omega, "omega")?,
        },
        "exp_tail" => MarginalModel::ExpTailEquivalent {
            shift: need(shift, "shift")?,
        },
        other => {
            return Err(Error::Validation {
                key: "family".into(),
                message: format!("unknown family `{other}`"),
            })
        }
    };
    model.validated()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, out) = args.load()?;
            let rows = harness::with_threads(args.threads, || harness::simulate(&cfg))?;
            emit_rows(&rows, out.as_deref())
        }
        Command::Limit { run, n } => {
            let (cfg, out) = run.load()?;
            let draws = n.unwrap_or(cfg.limit_draws);
            let rows = harness::with_threads(run.threads, || harness::limit_draws(&cfg, draws))??;
            emit_rows(&rows, out.as_deref())
        }
        Command::Converge(args) => {
            let (cfg, out) = args.load()?;
            let report =
                harness::with_threads(args.threads, || harness::run_convergence_experiment(&cfg))?;
            if let Some(reason) = &report.summary.limit.unavailable {
                eprintln!("limit law not sampled: {reason}");
            }
            match out {
                Some(path) => {
                    harness::write_csv(&report.rows, &report.summary, &path)?;
                    write_stdout(&harness::format_summary(&report.summary))
                }
                None => {
                    write_stdout(&harness::format_rows(&report.rows))?;
                    eprint!("{}", harness::format_summary(&report.summary));
                    Ok(())
                }
            }
        }
        Command::Norming {
            family,
            t,
            alpha,
            omega,
            shift,
        } => {
            let model = marginal(&family, alpha, omega, shift)?;
            let n = norming_constants(&model, t)?;
            write_stdout(&format!(
                "family,t,a,b,gamma,delta\n{family},{},{},{},{},{}\n",
                harness::report::format_float(t),
                harness::report::format_float(n.a),
                harness::report::format_float(n.b),
                harness::report::format_float(n.gamma),
                n.delta
            ))
        }
        Command::Moments { i, uncorrected } => {
            let (mean, var) = if uncorrected {
                uncorrected_moments(i)?
            } else {
                extremal_moments(i)?
            };
            write_stdout(&format!(
                "i,mean,variance\n{i},{},{}\n",
                harness::report::format_float(mean),
                harness::report::format_float(var)
            ))
        }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
