//! Command-line front end for `spaceforms`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use spaceforms::spherical_bounds::Variant;
use spaceforms::GeomError;

pub mod commands;
pub mod input;
pub mod report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 when a construction or search came back empty-handed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Geometry(GeomError::ConstructionFailed(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Triangle,
    Chain1,
    Chain2,
    ClosedOdd,
    OpenOdd,
    ClosedEven,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Triangle => Variant::Triangle,
            VariantArg::Chain1 => Variant::Chain1,
            VariantArg::Chain2 => Variant::Chain2,
            VariantArg::ClosedOdd => Variant::ClosedOdd,
            VariantArg::OpenOdd => Variant::OpenOdd,
            VariantArg::ClosedEven => Variant::ClosedEven,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spaceforms", version = report::VERSION, about = "Polygonal curves, cones and Möbius volume in space forms")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Main budget of the command: restarts, samples, instances or directions.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Tolerance for the command's pass/fail decision.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total curvature of a polygonal curve.
    Totcurv { curve: PathBuf },
    /// Length of a spherical polygon or chain against its bound.
    BoundsCheck {
        curve: PathBuf,
        /// Defaults to the variant matching the vertex count and closedness.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Search for the longest spherical polygon of a given shape.
    ExtremalSearch {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Dimension of the ambient Euclidean space of the sphere.
        #[arg(long, default_value_t = 3)]
        ambient: usize,
        #[arg(long, default_value_t = 400)]
        iterations: usize,
    },
    /// Simple closed polygon with 2m+1 vertices and near-maximal total curvature.
    Sharpness {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
    },
    /// Certify cone densities below 2 over the hull of a closed pentagon.
    Certify { curve: PathBuf },
    /// Supremum of the length of a spherical curve over Möbius maps.
    MobiusVol { curve: PathBuf },
    /// Cone density of a curve at a point.
    ConeDensity {
        curve: PathBuf,
        /// Coordinates of the apex in the curve's model.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
    },
    /// Density at the vertex of the cone over a curve at infinity.
    HypDensity {
        curve: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 5.0, 10.0])]
        radii: Vec<f64>,
    },
    /// Geodesic, Jacobi, Laplacian and end-curve checks in H²×R.
    H2xrCheck {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 5.0, 8.0, 16.0, 20.0])]
        radii: Vec<f64>,
    },
    /// Knot determinant of a closed polygon in R³ over random projections.
    KnotDet { curve: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Totcurv { .. } => "totcurv",
            Command::BoundsCheck { .. } => "bounds-check",
            Command::ExtremalSearch { .. } => "extremal-search",
            Command::Sharpness { .. } => "sharpness",
            Command::Certify { .. } => "certify",
            Command::MobiusVol { .. } => "mobius-vol",
            Command::ConeDensity { .. } => "cone-density",
            Command::HypDensity { .. } => "hyp-density",
            Command::H2xrCheck { .. } => "h2xr-check",
            Command::KnotDet { .. } => "knot-det",
        }
    }

    pub fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Totcurv { curve }
            | Command::BoundsCheck { curve, .. }
            | Command::Certify { curve }
            | Command::MobiusVol { curve }
            | Command::ConeDensity { curve, .. }
            | Command::HypDensity { curve, .. }
            | Command::KnotDet { curve } => Some(curve),
            _ => None,
        }
    }
}

/// Run the parsed command and return the rendered report with its exit code.
pub fn run(cli: &Cli) -> Result<(String, i32), CliError> {
    if cli.budget == Some(0) {
        return Err(CliError::Input("--budget must be at least 1".into()));
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input("--tol must be positive".into()));
        }
    }
    let (report, budget) = commands::dispatch(cli)?;
    let provenance = report::Provenance {
        tool: "spaceforms",
        version: report::version(),
        command: cli.command.name(),
        seed: cli.seed,
        budget,
        tol: cli.tol,
        input: cli.command.input().map(|p| p.display().to_string()),
    };
    let env = report.envelope(&provenance)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&env)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => report::csv(&env, report.table.as_ref())?,
    };
    Ok((text, report.exit_code))
}

/// Parse arguments, run, write the report; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
