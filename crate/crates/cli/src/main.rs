use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gradual_core::litmus::run_matrix;
use gradual_core::surface::{check_program, parse_program, SurfaceProgram};
use gradual_core::translate::{translate_program, Semantics, SemanticsError, TranslateError};
use gradual_core::vm::{Machine, Outcome, DEFAULT_FUEL};

const OK: u8 = 0;
const STATIC_ERROR: u8 = 1;
const STUCK: u8 = 2;
const FUEL: u8 = 3;
const USAGE: u8 = 4;
const MISMATCH: u8 = 5;

/// Gradual typing workbench: check, translate and run surface programs.
#[derive(Parser, Debug)]
#[command(name = "gradual", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check a surface program.
    Check {
        /// A `.gt` source file.
        path: PathBuf,
    },

    /// Print the KafKa translation of a surface program.
    Translate {
        /// optional, transient, behavioral or concrete.
        #[arg(long)]
        semantics: String,
        path: PathBuf,
    },

    /// Translate and evaluate a surface program.
    Run {
        #[arg(long)]
        semantics: String,
        /// Maximum number of reduction steps.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Emit a JSON-lines trace of every step instead of the outcome.
        #[arg(long)]
        trace: bool,
        path: PathBuf,
    },

    /// Run the litmus programs under every semantics and compare with the
    /// expected outcomes.
    Litmus {
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        json: bool,
    },
}

struct Failure(u8, String);

fn load(path: &Path) -> Result<SurfaceProgram, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure(USAGE, format!("cannot read {}: {e}", path.display())))?;
    parse_program(&src).map_err(|e| Failure(STATIC_ERROR, format!("{}:{}: {}", path.display(), e.pos, e.message)))
}

fn semantics(name: &str) -> Result<Semantics, Failure> {
    name.parse().map_err(|e: SemanticsError| Failure(USAGE, e.to_string()))
}

fn translate(s: Semantics, p: &SurfaceProgram) -> Result<gradual_core::kafka::KafkaProgram, Failure> {
    translate_program(s, p).map_err(|TranslateError::IllTyped(errors)| {
        Failure(STATIC_ERROR, errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
    })
}

fn execute(command: Command, out: &mut impl Write) -> Result<u8, Failure> {
    let io = |e: std::io::Error| match e.kind() {
        // The reader went away (`gradual run --trace ... | head`).
        std::io::ErrorKind::BrokenPipe => Failure(OK, String::new()),
        _ => Failure(USAGE, e.to_string()),
    };
    match command {
        Command::Check { path } => {
            let p = load(&path)?;
            match check_program(&p) {
                Ok(_) => writeln!(out, "OK").map_err(io)?,
                Err(errors) => {
                    for e in errors {
                        writeln!(out, "{}: {e}", path.display()).map_err(io)?;
                    }
                    return Ok(STATIC_ERROR);
                }
            }
            Ok(OK)
        }
        Command::Translate { semantics: name, path } => {
            let s = semantics(&name)?;
            let program = translate(s, &load(&path)?)?;
            writeln!(out, "{program}").map_err(io)?;
            Ok(OK)
        }
        Command::Run { semantics: name, fuel, trace, path } => {
            let s = semantics(&name)?;
            let program = translate(s, &load(&path)?)?;
            let mut records = Vec::new();
            let mut machine = Machine::new(program.table, program.main);
            let outcome = machine
                .run(fuel, trace.then_some(&mut records))
                .map_err(|e| Failure(STATIC_ERROR, format!("evaluation error: {e}")))?;
            if trace {
                for r in &records {
                    writeln!(out, "{}", r.to_json()).map_err(io)?;
                }
            } else {
                writeln!(out, "{outcome}").map_err(io)?;
            }
            Ok(match outcome {
                Outcome::Value(_) => OK,
                Outcome::Stuck { .. } => STUCK,
                Outcome::FuelExhausted => FUEL,
            })
        }
        Command::Litmus { fuel, json } => {
            let report = run_matrix(fuel);
            if json {
                writeln!(out, "{}", report.to_json()).map_err(io)?;
            } else {
                write!(out, "{}", report.to_text()).map_err(io)?;
            }
            Ok(if report.mismatches().is_empty() { OK } else { MISMATCH })
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    // Deeply nested terms recurse in the printer and checker.
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            execute(args.command, &mut out)
        })
        .expect("spawn worker thread");
    match worker.join().expect("worker thread panicked") {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
