mod commands;
mod render;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "vsc", version, about = "Simple-current extensions of lattice and affine vertex operator algebras")]
struct Cli {
    /// Truncation order N for series and characters.
    #[arg(long, global = true, default_value_t = 6)]
    cutoff: u32,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the extension described by a JSON spec (inline, a path, or `-` for stdin).
    Classify { spec: String },
    /// Run an identity suite and report pass/fail per identity.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Lattice Gram matrix as JSON (delta, characters, jacobi); default A1.
        #[arg(long)]
        gram: Option<String>,
        /// Extension spec for the cocycle suite; default D4 at level 2.
        #[arg(long)]
        spec: Option<String>,
        /// Largest module weight of the Jacobi vectors.
        #[arg(long, default_value = "1")]
        max_weight: String,
        /// Bound on the exponents compared in the Jacobi identity.
        #[arg(long, default_value_t = 4)]
        window: u32,
        /// Check only this many randomly chosen Jacobi triples (0 = all).
        #[arg(long, default_value_t = 0)]
        sample: usize,
        /// Multiply the commutation factor by -1 (the suite must then fail).
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
    /// Minimal weights of a simple type, as 1-based indices.
    Minimal {
        #[arg(value_name = "TYPE")]
        ty: String,
    },
    /// Expand Δ(α,z)v in a lattice model.
    DeltaApply {
        #[arg(long)]
        gram: Option<String>,
        /// `α` as comma-separated rationals in the lattice basis.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// `vacuum`, `omega`, `h:<coords>` for h(-1)1, or `exp:<ints>` for e^γ.
        #[arg(long, default_value = "omega", allow_hyphen_values = true)]
        vector: String,
    },
    /// Graded dimensions of the deformed module and of the coset module.
    Character {
        #[arg(long)]
        gram: Option<String>,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        beta: String,
    },
    /// The finite group outer/inner of two sublattices of one frame.
    Quotient { input: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Delta,
    Jacobi,
    Cocycle,
    Characters,
}

/// Everything a command needs besides its own arguments.
pub struct RunConfig {
    pub cutoff: u32,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Inline JSON, `-` for stdin, or a path.
pub fn read_input(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn run(cli: Cli) -> Result<(serde_json::Value, bool), Failure> {
    let cfg = RunConfig {
        cutoff: cli.cutoff,
        seed: cli.seed,
        output: cli.output,
        format: cli.format,
    };
    let (value, ok) = match &cli.command {
        Command::Classify { spec } => (commands::classify(&read_input(spec)?)?, true),
        Command::Verify {
            suite,
            gram,
            spec,
            max_weight,
            window,
            sample,
            inject_sign_error,
        } => {
            let report = match suite {
                Suite::Delta => commands::verify_delta(&cfg, gram.as_deref())?,
                Suite::Characters => commands::verify_characters(&cfg, gram.as_deref())?,
                Suite::Cocycle => commands::verify_cocycle(spec.as_deref())?,
                Suite::Jacobi => commands::verify_jacobi(
                    &cfg,
                    gram.as_deref(),
                    max_weight,
                    *window,
                    *sample,
                    *inject_sign_error,
                )?,
            };
            let ok = report.passed;
            (serde_json::to_value(report).expect("report serializes"), ok)
        }
        Command::Minimal { ty } => (commands::minimal(ty)?, true),
        Command::DeltaApply { gram, alpha, vector } => (commands::delta_apply(gram.as_deref(), alpha, vector)?, true),
        Command::Character { gram, beta } => {
            let v = commands::character(&cfg, gram.as_deref(), beta)?;
            let ok = v["outcome"]["passed"].as_bool().unwrap_or(false);
            (v, ok)
        }
        Command::Quotient { input } => (commands::quotient(&read_input(input)?)?, true),
    };
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("json value"),
        Format::Text => render::text(&value),
    };
    match &cfg.output {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Failure::Input(format!("stdout: {e}"))),
                _ => {}
            }
        }
    }
    Ok((value, ok))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((_, true)) => ExitCode::SUCCESS,
        Ok((_, false)) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
