mod commands;
mod error;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION};
use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "ruelle",
    version,
    about = "Transfer operators, Gibbs measures and FKG checks on {-1,+1}^N"
)]
pub struct Cli {
    /// Worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file for the main artifact (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ising,
    Product,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Power,
    Geometric,
    Explicit,
}

#[derive(Args, Debug, Clone)]
pub struct PotentialArgs {
    /// Potential as a JSON file path or inline JSON object; overrides the flags below.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, value_enum, default_value_t = KindArg::Ising)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Power)]
    pub rule: RuleArg,
    /// Power-law exponent.
    #[arg(long, default_value_t = 2.2)]
    pub gamma: f64,
    /// Geometric ratio.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Explicit couplings a_1,a_2,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub couplings: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub field: f64,
    /// Number of retained couplings K.
    #[arg(long, default_value_t = 16)]
    pub truncation: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl SignArg {
    pub fn spin(self) -> i8 {
        match self {
            SignArg::Plus => 1,
            SignArg::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuadratureArg {
    Cylinder,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CylinderBoundaryArg {
    Plus,
    Flip,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Covariances of all monotone indicator pairs in volumes 1..=max.
    FkgVerify {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 4)]
        max_volume: usize,
        #[arg(long, value_delimiter = ',', default_value = "plus,minus,alt")]
        boundaries: Vec<String>,
    },
    /// Power iteration; emits z_n sorted by the [-1,1] embedding.
    EigenApprox {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 7)]
        iters: usize,
        #[arg(long, default_value_t = 12)]
        max_iters: usize,
        /// Working table depth (default: exact for the truncated potential).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        z0: SignArg,
        /// Add a z_prev column with the previous iterate.
        #[arg(long)]
        prev: bool,
    },
    /// Pressure estimate against log(2 cosh(β sum_{j<=K} j^-γ)).
    Pressure {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 30)]
        iters: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Magnetization gaps between plus and minus boundaries over a volume range.
    Phase {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 4)]
        min_volume: usize,
        #[arg(long, default_value_t = 14)]
        max_volume: usize,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        sites: Vec<usize>,
    },
    /// Eigenfunction from the involution kernel on words of a given depth.
    KernelEigen {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, value_enum, default_value_t = QuadratureArg::Cylinder)]
        quadrature: QuadratureArg,
        /// Cylinder quadrature depth.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = CylinderBoundaryArg::Plus)]
        cylinder_boundary: CylinderBoundaryArg,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depth of the evaluation words x.
        #[arg(long, default_value_t = 8)]
        word_depth: usize,
        /// Tail completing the evaluation words.
        #[arg(long, default_value = "plus")]
        boundary: String,
    },
    /// The binary model: c φ and L φ on a grid, plus Taylor coefficients at 0.
    Binary {
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Class 𝓔, class 𝓕 and mirror checks.
    ClassCheck {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// The potential tabulated over words, sorted by the [-1,1] embedding.
    PotentialGraph {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value = "plus")]
        boundary: String,
    },
    /// Weights of a finite-volume Gibbs measure.
    Measure {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 4)]
        volume: usize,
        #[arg(long, default_value = "plus")]
        boundary: String,
    },
    /// Data behind one of the simulation figures.
    Figure {
        #[arg(value_enum)]
        id: figures::FigureId,
    },
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    configure_threads(cli.threads)?;
    let artifact = commands::dispatch(&cli.command)?;
    output::emit(&artifact, cli.format, cli.out.as_deref(), cli.report.as_deref())?;
    eprintln!("{}", artifact.summary);
    if let Some(v) = &artifact.violation {
        eprintln!("violation: {v}");
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
