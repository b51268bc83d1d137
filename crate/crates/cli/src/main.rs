use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orthosynth::batch::{run_bench, BenchConfig, Execution};
use orthosynth::synth2::SynthOptions;
use orthosynth::toolkit::{check_paper, cmd_random, cmd_synth, cmd_verify, OutputFormat};

#[derive(Parser)]
#[command(name = "orthosynth", version, about = "Synthesize real orthogonal 2- and 3-qubit gates into CNOT + Ry/Rz circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit for a 4x4 or 8x8 orthogonal matrix
    Synth {
        /// Matrix file (JSON or plain), `-` for stdin
        matrix: PathBuf,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: OutputFormat,
        #[arg(long)]
        no_optimize: bool,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        /// Write the circuit here instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare a circuit against a matrix
    Verify {
        /// Circuit file (text or JSON)
        circuit: PathBuf,
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
    },
    /// Generate a seeded Haar-random orthogonal matrix
    Random {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random -> synth -> verify over many seeded samples
    Bench {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long)]
        no_optimize: bool,
        /// Per-sample records as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Run samples on one thread
        #[arg(long)]
        sequential: bool,
    },
    /// Run the built-in identity suite
    CheckPaper {
        #[arg(long, hide = true)]
        transpose_cnot: bool,
    },
}

#[derive(Args)]
struct Shape {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    qubits: u8,
    /// Determinant, +1 or -1
    #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_det)]
    det: i8,
}

fn parse_det(s: &str) -> Result<i8, String> {
    match s {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("determinant must be +1 or -1, got {s:?}")),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: orthosynth::Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<orthosynth::Error> for Failure {
    fn from(e: orthosynth::Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_failure(path, e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(path, e))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(no_optimize: bool) -> SynthOptions {
    SynthOptions {
        optimize: !no_optimize,
        ..SynthOptions::default()
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Synth {
            matrix,
            format,
            no_optimize,
            threshold,
            output,
        } => {
            let out = cmd_synth(&read_input(&matrix)?, &options(no_optimize), format, threshold)?;
            write_output(output.as_deref(), &out.body)?;
            eprintln!("{}", out.summary);
            Ok(if out.passed { 0 } else { 1 })
        }
        Command::Verify {
            circuit,
            matrix,
            threshold,
        } => {
            let report = cmd_verify(&read_input(&circuit)?, &read_input(&matrix)?, threshold)?;
            println!("{report}");
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Random { shape, seed, output } => {
            let file = cmd_random(shape.qubits as usize, seed, shape.det)?;
            write_output(output.as_deref(), &(file.to_json() + "\n"))?;
            Ok(0)
        }
        Command::Bench {
            shape,
            samples,
            seed,
            threshold,
            no_optimize,
            csv,
            sequential,
        } => {
            let cfg = BenchConfig {
                det: shape.det,
                threshold,
                opts: options(no_optimize),
                ..BenchConfig::new(shape.qubits as usize, samples, seed)
            };
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            let report = run_bench(&cfg, exec).map_err(|e| Failure {
                code: e.exit_code() as u8,
                message: e.to_string(),
            })?;
            print!("{}", report.table());
            if let Some(path) = csv {
                let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
                report.write_csv(file).map_err(|e| Failure {
                    code: 2,
                    message: format!("{}: {e}", path.display()),
                })?;
            }
            Ok(0)
        }
        Command::CheckPaper { transpose_cnot } => {
            let report = check_paper(transpose_cnot);
            println!("{report}");
            Ok(report.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
