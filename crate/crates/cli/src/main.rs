use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ricci_pinch::orbit::{SearchConfig, Strategy};
use ricci_pinch_cli::commands::{self, Form, Format};
use ricci_pinch_cli::lemma::{self, AiOptions, FanOptions};
use ricci_pinch_cli::{file, CliError, Outcome, Range, EXIT_INPUT};

/// Curvature, pinching and soliton tools for left-invariant metrics on
/// solvable Lie groups.
#[derive(Parser)]
#[command(name = "rp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Blocks,
    Generic,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    Gradient,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "fAn")]
    FAn,
    #[value(name = "fAi")]
    FAi,
}

#[derive(Subcommand)]
enum Command {
    /// Ricci operator, scalar curvature, |Ric|^2 and F.
    Ricci {
        file: String,
        #[arg(long, value_enum, default_value = "both")]
        form: FormArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Decide whether the metric is a (nil/solv)soliton.
    Certify {
        file: String,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Search the orbit of a soliton for larger values of F (JSON output).
    Maximize {
        file: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "hybrid")]
        strategy: StrategyArg,
    },
    /// Sweep one of the two scalar lemmas over a parameter box (JSON output).
    Lemma {
        #[arg(long, value_enum)]
        which: Which,
        /// Points per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "0.1:10")]
        x0: Range,
        /// Default 0.1:10 for fAn, 0:10 for fAi.
        #[arg(long)]
        a: Option<Range>,
        #[arg(long, default_value = "0.1:10")]
        b: Range,
        #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
        c: Range,
        #[arg(long, default_value_t = 100.0)]
        x_span: f64,
        /// Certificate rows kept in the fAn report.
        #[arg(long, default_value_t = 10)]
        table: usize,
        /// Number of x variables for fAi.
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        /// Monte-Carlo samples for fAi instead of a grid.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("RP_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "RP_THREADS must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Ricci { file, form, format } => {
            let alg = file::ingest(&file::read(&file)?)?;
            let form = match form {
                FormArg::Blocks => Form::Blocks,
                FormArg::Generic => Form::Generic,
                FormArg::Both => Form::Both,
            };
            commands::ricci(&alg, form, format.into())
        }
        Command::Certify { file, format } => {
            let alg = file::ingest(&file::read(&file)?)?;
            commands::certify(&alg, format.into())
        }
        Command::Maximize {
            file,
            trials,
            starts,
            iters,
            seed,
            strategy,
        } => {
            let threads = threads_from_env()?;
            let alg = file::ingest(&file::read(&file)?)?;
            let cfg = SearchConfig {
                strategy: match strategy {
                    StrategyArg::Random => Strategy::RandomSearch,
                    StrategyArg::Gradient => Strategy::GradientAscent,
                    StrategyArg::Hybrid => Strategy::Hybrid,
                },
                trials,
                starts,
                iters,
                seed,
                threads,
                ..SearchConfig::default()
            };
            commands::maximize(&alg, &cfg)
        }
        Command::Lemma {
            which,
            grid,
            x0,
            a,
            b,
            c,
            x_span,
            table,
            r,
            x_max,
            samples,
            seed,
        } => match which {
            Which::FAn => {
                let d = FanOptions::default();
                lemma::fan(&FanOptions {
                    x0,
                    a: a.unwrap_or(d.a),
                    b,
                    c,
                    x_span,
                    grid: grid.unwrap_or(d.grid),
                    table,
                })
            }
            Which::FAi => {
                let d = AiOptions::default();
                lemma::fai(&AiOptions {
                    r,
                    a: a.unwrap_or(d.a),
                    x_max,
                    grid: grid.unwrap_or(d.grid),
                    samples,
                    seed,
                })
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
