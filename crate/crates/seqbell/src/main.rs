use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seqbell::cli;
use seqbell::protocol::Scheme;

#[derive(Parser)]
#[command(
    name = "seqbell",
    version,
    about = "Sequential-observer CHSH simulator: curves, optima, Monte Carlo runs, and dual-rail circuit checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Original,
    Optimal,
}

impl From<SchemeArg> for Scheme {
    fn from(arg: SchemeArg) -> Self {
        match arg {
            SchemeArg::Original => Scheme::Original,
            SchemeArg::Optimal => Scheme::Optimal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate both CHSH parameters over a strength grid, as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        g_min: f64,
        #[arg(long, default_value_t = 1.0)]
        g_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Original)]
        scheme: SchemeArg,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize min(I1, I2) over the angle choices at one strength.
    Optimize {
        #[arg(long)]
        g: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sample a finite-statistics experiment at the scheme's angles.
    Simulate {
        #[arg(long)]
        g: f64,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Original)]
        scheme: SchemeArg,
        /// Output CSV path for the counts table; a summary prints as JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify the dual-rail circuit against the Kraus construction.
    Circuit {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn run(command: Command) -> seqbell::Result<bool> {
    match command {
        Command::Sweep {
            g_min,
            g_max,
            steps,
            scheme,
            out,
        } => {
            let rows = cli::sweep_rows(g_min, g_max, steps, scheme.into())?;
            std::fs::write(&out, cli::sweep_csv(&rows))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(true)
        }
        Command::Optimize { g, format } => {
            let report = cli::optimize_report(g)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                _ => print!("{}", cli::optimize_text(&report)),
            }
            Ok(true)
        }
        Command::Simulate {
            g,
            shots,
            seed,
            scheme,
            out,
        } => {
            let (batch, summary) = cli::run_simulation(g, shots, seed, scheme.into())?;
            std::fs::write(&out, batch.to_csv())?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(true)
        }
        Command::Circuit { theta, phi, format } => {
            let report = cli::circuit_report(theta, phi)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                _ => print!("{}", cli::circuit_text(&report)),
            }
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
