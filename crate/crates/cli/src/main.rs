//! `hermscal`: batch front-end over the manifold catalog and the identity suite.

mod config;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{InputError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hermscal", version, about = "Scalar-curvature identities of canonical Hermitian connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog summary: name, dimension, class, exportability.
    List(OutputArgs),
    /// Run every applicable identity and the integral theorems.
    Verify(RunArgs),
    /// Scalar curvatures by contraction and by closed form.
    Scalars(RunArgs),
    /// Integrate named quantities over the fundamental domain.
    Integrate {
        #[command(flatten)]
        run: RunArgs,
        /// e.g. `s`, `s1:t=0.5`, `twice-s1-minus-s:t=1`, `kgauduchon:k=2`; repeatable.
        #[arg(long = "integrand", required = true)]
        integrands: Vec<String>,
    },
    /// Gray–Hervella label with per-component maxima.
    Classify {
        #[command(flatten)]
        run: RunArgs,
        /// Squared norm above which a component counts as present.
        #[arg(long, default_value_t = hermscal_core::identities::CLASS_TOL)]
        class_tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Catalog name.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    manifold: Option<String>,
    /// JSON manifold spec file.
    #[arg(long)]
    spec: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Quadrature nodes for the integral checks.
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    /// Comma-separated parameter values; defaults to -1,0,1/2,t*,1,2.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, default_value_t = hermscal_core::identities::DEFAULT_TOL_ABS)]
    tol_abs: f64,
    #[arg(long, default_value_t = hermscal_core::identities::DEFAULT_TOL_REL)]
    tol_rel: f64,
    #[command(flatten)]
    output: OutputArgs,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// `Ok(pass)` or an input error.
fn run(cmd: Command) -> Result<bool, InputError> {
    match cmd {
        Command::List(o) => {
            let doc = report::list();
            report::emit(&doc, o.format, o.out.as_deref())?;
            Ok(true)
        }
        Command::Verify(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let (doc, pass) = report::verify(&cfg)?;
            report::emit(&doc, cfg.format, cfg.out.as_deref())?;
            Ok(pass)
        }
        Command::Scalars(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let doc = report::scalars(&cfg)?;
            report::emit(&doc, cfg.format, cfg.out.as_deref())?;
            Ok(true)
        }
        Command::Integrate { run, integrands } => {
            let cfg = RunConfig::from_args(&run)?;
            let doc = report::integrate(&cfg, &integrands)?;
            report::emit(&doc, cfg.format, cfg.out.as_deref())?;
            Ok(true)
        }
        Command::Classify { run, class_tol } => {
            let cfg = RunConfig::from_args(&run)?;
            if !(class_tol > 0.0) {
                return Err(InputError::new("--class-tol must be positive"));
            }
            let (doc, label) = report::classify(&cfg, class_tol)?;
            report::emit(&doc, cfg.format, cfg.out.as_deref())?;
            eprintln!("{label}");
            Ok(true)
        }
    }
}
