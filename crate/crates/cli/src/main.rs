use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nplectic::calculus::DEFAULT_ARITY_CAP;
use nplectic::Error;

mod commands;

/// Exact n-plectic calculus, brackets and verification suites.
#[derive(Debug, Parser)]
#[command(name = "nplectic", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Seed for every random sample.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Largest bracket arity any computation may use.
    #[arg(long, env = "NPLECTIC_ARITY_CAP", default_value_t = DEFAULT_ARITY_CAP, global = true)]
    arity_cap: usize,
    /// Largest coefficient degree in slice computations.
    #[arg(long, default_value_t = 1, global = true)]
    window: u32,
    /// Report path; the report goes to stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct Inputs {
    /// Pair file, or a structure file whose pair is used.
    #[arg(long)]
    pair: Option<PathBuf>,
    /// Structure file.
    #[arg(long)]
    structure: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the pair axioms.
    ValidatePair {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Check that a candidate (f, g) is a morphism of pairs.
    ValidateMorphism {
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Higher bracket of the tensors in an elements file.
    Bracket {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        elements: PathBuf,
    },
    /// Differential of each cotensor in an elements file.
    Differential {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        elements: PathBuf,
    },
    /// Contraction i_x f for consecutive (tensor, cotensor) elements.
    Contract {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        elements: PathBuf,
    },
    /// Lie derivative L_x f for consecutive (tensor, cotensor) elements.
    LieDerivative {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        elements: PathBuf,
    },
    /// Validate a structure, classify tensors and check the pairing laws.
    NplecticCheck {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        elements: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
    /// Weak Jacobi for tensor brackets, extension brackets or a finite algebra.
    Jacobi {
        #[command(flatten)]
        inputs: Inputs,
        /// Finite L-infinity algebra file, checked on every basis tuple.
        #[arg(long)]
        linf: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
        #[arg(long, default_value_t = 10)]
        instances: usize,
    },
    /// Hamiltonian and Chevalley-Eilenberg rank tables.
    Cohomology {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Poisson brackets on Hamiltonian cohomology.
    Poisson {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
        #[arg(long, default_value_t = 5)]
        instances: usize,
    },
    /// Certify a candidate momentum map.
    MomentumCheck {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        momentum: PathBuf,
        #[arg(long, default_value_t = nplectic::linf::DEFAULT_MORPHISM_ARITY)]
        max_arity: usize,
    },
    /// Cartan rules, d^2 = 0 and the fundamental pairing.
    Identities {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let Cli { common, command } = Cli::parse();
    let name = commands::name(&command);
    let start = Instant::now();
    let result = commands::run(&command, &common).and_then(|(passed, json)| {
        match &common.output {
            Some(path) => std::fs::write(path, &json).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            None => print!("{json}"),
        }
        Ok(passed)
    });
    eprintln!("{name}: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
