//! `tgeo`: classify σ-spaces, scan tubes, check Euclidean structure and run the sphere study.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 internal inconsistency.

mod commands;
mod domain;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "tgeo",
    version,
    about = "Geometry from a world function σ = ½ρ²"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate F_n and multivector length classes over (n+1)-point subsets.
    Classify {
        #[command(flatten)]
        domain: DomainArgs,
        /// Orders n to tabulate, comma separated.
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Membership residual of every point in the tube spanned by a basis.
    Tube {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        basis: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Section of a tube through one of its points.
    Section {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        basis: Vec<usize>,
        /// The tube point the section passes through.
        #[arg(long)]
        point: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Triangle-inequality census around the segment between two basis points.
    Degeneracy {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        basis: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Euclidean structure check of order n, or a finite embedding when no order is given.
    EmbedCheck {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sphere intrinsic metric from circles through random point pairs.
    SphereDemo {
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = tgeometry::sphere::DEFAULT_CANDIDATES)]
        candidates: usize,
        #[arg(long, default_value_t = tgeometry::sphere::DEFAULT_QUADRATURE_STEPS)]
        steps: usize,
        /// Leave the analytic great-circle point out of the candidate set.
        #[arg(long)]
        no_great_circle: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct DomainArgs {
    /// Point cloud (.json, or .csv rows with --generator) or value table (.csv).
    #[arg(long)]
    input: PathBuf,
    /// Whether table entries are σ or ρ.
    #[arg(long)]
    values: Option<String>,
    /// Generator applied to the input coordinates, overriding the file.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Diagonal ±1 entries for pseudo_euclidean, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signature: Option<Vec<i8>>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Relative tolerance for zero tests.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// Failure of a command, mapped onto the exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl From<tgeometry::Error> for Failure {
    fn from(e: tgeometry::Error) -> Self {
        match e {
            tgeometry::Error::Internal(m) => Failure::Internal(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// What a successful command produced.
struct Outcome {
    text: String,
    negative: bool,
}

fn run(cli: Cli) -> Result<(Outcome, RunArgs), Failure> {
    match cli.command {
        Command::Classify { domain, order, run } => {
            let wf = domain::load(&domain)?;
            Ok((commands::classify(&wf, &order, &run)?, run))
        }
        Command::Tube { domain, basis, run } => {
            let wf = domain::load(&domain)?;
            Ok((commands::tube(&wf, &basis, &run)?, run))
        }
        Command::Section {
            domain,
            basis,
            point,
            run,
        } => {
            let wf = domain::load(&domain)?;
            Ok((commands::section(&wf, &basis, point, &run)?, run))
        }
        Command::Degeneracy { domain, basis, run } => {
            let wf = domain::load(&domain)?;
            Ok((commands::degeneracy(&wf, &basis, &run)?, run))
        }
        Command::EmbedCheck { domain, order, run } => {
            let wf = domain::load(&domain)?;
            Ok((commands::embed_check(&wf, order, &run)?, run))
        }
        Command::SphereDemo {
            pairs,
            candidates,
            steps,
            no_great_circle,
            run,
        } => {
            let demo = commands::SphereDemo {
                pairs,
                candidates,
                steps,
                great_circle: !no_great_circle,
            };
            Ok((commands::sphere_demo(&demo, &run)?, run))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, args)) => {
            if let Err(e) = output::emit(&outcome.text, args.out.as_deref()) {
                eprintln!("tgeo: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.negative { 1 } else { 0 })
        }
        Err(Failure::Input(m)) => {
            eprintln!("tgeo: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("tgeo: internal error: {m}");
            ExitCode::from(3)
        }
    }
}
