use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hfcert::integrals::SyntheticParams;
use hfcert_cli::{run, write_atomic, Command, RunConfig, Status, SyntheticShape};

#[derive(Parser)]
#[command(
    name = "hfcert",
    version,
    about = "Certified Newton solves for discretized Hartree-Fock"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check integral symmetries and the weight axioms.
    Validate(Common),
    /// Measure the localization and isolation constants.
    Conditions(Common),
    /// Evaluate the Kantorovich certificate.
    Certify(Common),
    /// Run Newton's method from the canonical density matrix.
    Solve(Common),
    /// Orthonormalize the basis given its Gram matrix.
    Orthogonalize(Common),
    /// Everything above for one input.
    Report(Common),
    /// Write a synthetic integral set.
    Generate(Common),
}

#[derive(Args)]
struct Common {
    /// integralset.v1 document; a synthetic instance is generated from
    /// --seed when omitted.
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Re-anchor the chart at every Newton iterate.
    #[arg(long)]
    recenter: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// weights.v1 document overriding any weights in the input.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// gram.v1 document.
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Exponent for weights derived from orbital centres.
    #[arg(long, default_value_t = 2.0)]
    weight_exponent: f64,
    /// Random trials in the contraction-bound check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 6)]
    nu: usize,
    #[arg(long, default_value_t = 2)]
    n_elec: usize,
    #[arg(long, default_value_t = SyntheticParams::default().gap)]
    gap: f64,
    #[arg(long, default_value_t = SyntheticParams::default().coupling)]
    coupling: f64,
    #[arg(long, default_value_t = SyntheticParams::default().decay)]
    decay: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Conditions(c) => (Command::Conditions, c),
        Cmd::Certify(c) => (Command::Certify, c),
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Orthogonalize(c) => (Command::Orthogonalize, c),
        Cmd::Report(c) => (Command::Report, c),
        Cmd::Generate(c) => (Command::Generate, c),
    };
    let cfg = RunConfig {
        command,
        input: c.input,
        tol: c.tol,
        max_iter: c.max_iter,
        recenter: c.recenter,
        seed: c.seed,
        weights: c.weights,
        gram: c.gram,
        weight_exponent: c.weight_exponent,
        contraction_trials: c.trials,
        synthetic: SyntheticShape {
            nu: c.nu,
            n_elec: c.n_elec,
            params: SyntheticParams {
                gap: c.gap,
                coupling: c.coupling,
                decay: c.decay,
                ..SyntheticParams::default()
            },
        },
    };
    let status = match run(&cfg) {
        Ok(out) => {
            let written = match &c.output {
                Some(path) => write_atomic(path, &out.document),
                None => {
                    print!("{}", out.document);
                    Ok(())
                }
            };
            match written {
                Ok(()) => out.status,
                Err(e) => {
                    eprintln!("hfcert: cannot write output: {e}");
                    Status::InvalidInput
                }
            }
        }
        Err(e) => {
            eprintln!("hfcert: {e}");
            e.status()
        }
    };
    ExitCode::from(status.code() as u8)
}
