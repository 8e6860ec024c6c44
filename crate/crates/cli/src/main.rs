//! `peakon`: JSON and CSV front end for the forward and inverse spectral
//! maps of interlacing peakon configurations.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use peakon_cli::{run, Command, CommandRequest, ExitStatus, Mode};

#[derive(Parser, Debug)]
#[command(name = "peakon", version, about, allow_negative_numbers = true)]
struct Args {
    /// Command to run.
    #[arg(value_enum)]
    command: Command,
    /// Input JSON file (standard input when absent).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Arithmetic: binary64, or exact rationals.
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    mode: Mode,
    /// Acceptance threshold for `roundtrip`; replaces the measured-row
    /// tolerances of `verify`.
    #[arg(long)]
    tol: Option<f64>,
    /// Start of the `evolve` time grid.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// End of the `evolve` time grid.
    #[arg(long, default_value_t = 1.0)]
    t1: f64,
    /// Number of intervals in the `evolve` time grid.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Spectral parameter for `wavefunction` (decimal or p/q).
    #[arg(long)]
    lambda: Option<String>,
    /// Suite for `verify`, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Seed for the randomized `verify` suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Random cases per K for the roundtrip suites of `verify`.
    #[arg(long)]
    samples: Option<usize>,
}

fn read_input(path: Option<&PathBuf>) -> io::Result<String> {
    match path {
        Some(path) => fs::read_to_string(path),
        None => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let request = CommandRequest {
        command: args.command,
        mode: args.mode,
        tolerance: args.tol,
        t0: args.t0,
        t1: args.t1,
        steps: args.steps,
        lambda: args.lambda,
        suite: args.suite,
        seed: args.seed,
        samples: args.samples,
    };
    let input = if request.needs_input() {
        match read_input(args.input.as_ref()) {
            Ok(text) => text,
            Err(err) => {
                let source = args
                    .input
                    .as_ref()
                    .map_or("standard input".into(), |p| p.display().to_string());
                eprintln!("error: cannot read {source}: {err}");
                return exit(ExitStatus::InputError);
            }
        }
    } else {
        String::new()
    };
    let outcome = run(&request, &input);
    for message in &outcome.diagnostics {
        eprintln!("error: {message}");
    }
    if let Err(err) = write_output(args.output.as_ref(), &outcome.output) {
        eprintln!("error: cannot write output: {err}");
        return exit(ExitStatus::InputError);
    }
    exit(outcome.status)
}
