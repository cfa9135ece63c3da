use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conelim::commands::{self, Outcome, RandomArgs, EXIT_INPUT};

/// Limits of twisted Hitchin pairs on split bundles over the projective line.
#[derive(Parser)]
#[command(name = "conelim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an instance file.
    Validate { file: PathBuf },
    /// Full report: Hitchin image, stability, classification, limit, flow.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the gauge flow and compare with the predicted limit.
    Flow {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stability verdict with every subbundle check.
    Stability {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate a seeded random instance. CONELIM_SEED overrides --seed.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        shape: String,
        #[arg(long)]
        stable: bool,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        twist_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        twist_max: i64,
        #[arg(long)]
        l: Option<i64>,
    },
    /// Compare symbolic answers with the independent oracles.
    Oracle { file: PathBuf },
}

fn read(file: &PathBuf) -> Result<String, Outcome> {
    std::fs::read_to_string(file).map_err(|e| Outcome {
        stdout: String::new(),
        stderr: format!("input error: {}: {e}\n", file.display()),
        code: EXIT_INPUT,
    })
}

fn run(cli: Cli) -> Outcome {
    let with_file = |file: &PathBuf, f: &dyn Fn(&str) -> Outcome| match read(file) {
        Ok(text) => f(&text),
        Err(o) => o,
    };
    match cli.command {
        Command::Validate { file } => with_file(&file, &commands::validate),
        Command::Analyze { file, json } => with_file(&file, &|t| commands::analyze_cmd(t, json)),
        Command::Flow { file, json } => with_file(&file, &|t| commands::flow(t, json)),
        Command::Stability { file, json } => with_file(&file, &|t| commands::stability(t, json)),
        Command::Oracle { file } => with_file(&file, &commands::oracle),
        Command::Random { seed, rank, shape, stable, twist_min, twist_max, l } => {
            // the environment wins over the flag
            let seed = match std::env::var("CONELIM_SEED") {
                Ok(s) => match s.trim().parse() {
                    Ok(v) => v,
                    Err(_) => {
                        return Outcome {
                            stdout: String::new(),
                            stderr: format!("input error: CONELIM_SEED={s:?} is not an unsigned integer\n"),
                            code: EXIT_INPUT,
                        }
                    }
                },
                Err(_) => seed,
            };
            commands::random(&RandomArgs { seed, rank, shape, stable, twist_min, twist_max, l })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let out = run(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
