mod commands;
mod render;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use billiards::polygon::{read_polygon, shapes, write_polygon_text};
use billiards::{Polygon, PolygonError, Rational, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "billiards", version, about = "Trajectories, unfoldings, periodic orbits and equidistribution in polygonal billiards")]
pub struct Cli {
    /// Arithmetic backend.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
    /// Comparison tolerance of the float backend.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for sampled reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here (`-` for stdout instead of the text report).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write an SVG drawing here.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Polygon file: one `x y` vertex per line, integers or fractions.
    #[arg(long, short = 'p', global = true, conflicts_with = "table")]
    pub polygon: Option<PathBuf>,
    /// Built-in table, used when no polygon file is given.
    #[arg(long, global = true, value_enum)]
    pub table: Option<Table>,
    /// Write the normalized table in the polygon file format.
    #[arg(long, global = true)]
    pub save_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    Square,
    Triangle,
    Lshape,
}

/// A trajectory: start point, direction and number of links.
#[derive(Args, Debug, Clone)]
pub struct OrbitSpec {
    /// Start point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub pos: String,
    /// Direction `dx:dy`, `p/q pi`, or (float backend) radians.
    #[arg(long, allow_hyphen_values = true)]
    pub dir: String,
    /// Links to follow (periodic orbits stop after one period).
    #[arg(long, default_value_t = 20)]
    pub links: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Follow a trajectory and report its links and periodicity.
    Simulate(OrbitSpec),
    /// Unfold a trajectory into a straight segment across reflected copies.
    Unfold(OrbitSpec),
    /// Enumerate generalized diagonals up to a number of links.
    Diagonals {
        #[arg(long, default_value_t = 3)]
        max_links: usize,
    },
    /// Search translation words for cylinders of periodic orbits.
    Periodic {
        #[arg(long, default_value_t = 8)]
        max_word: usize,
        /// Keep only directions within `delta` of `theta`: `theta,delta` in radians.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Corridor nodes to expand at most.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Classify perpendicular orbits from sampled feet on one side (or all).
    Perp {
        #[arg(long)]
        side: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        max_links: usize,
        /// Also report the exceptional set, sampled with `--seed`.
        #[arg(long)]
        exceptional: bool,
    },
    /// Discrepancy of an orbit against the basis regions.
    Welldist {
        #[command(flatten)]
        orbit: OrbitSpec,
        /// Threshold on the sup discrepancy.
        #[arg(long)]
        eps: f64,
        /// Build the regions for this epsilon instead of `--eps`.
        #[arg(long)]
        basis: Option<f64>,
    },
    /// Whether an orbit comes within eps of every point of the table.
    Density {
        #[command(flatten)]
        orbit: OrbitSpec,
        #[arg(long)]
        eps: f64,
        /// Check every floor of the unfolded surface separately.
        #[arg(long)]
        surface: bool,
    },
    /// Periodic orbit of the L-shaped table that avoids the right square.
    Lshape {
        #[arg(long)]
        k: usize,
    },
    /// Look for well-distributed periodic orbits through a grid of points.
    Scan {
        /// Direction: `dx:dy`, `p/q pi`, or radians.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, default_value_t = 40)]
        max_word: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Numeric(_) => "numeric",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

/// What a command produced; written out only after it fully succeeded.
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub svg: String,
}

fn load_table<S: Scalar>(cli: &Cli) -> Result<Polygon<S>, CliError> {
    if let Some(path) = &cli.polygon {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return read_polygon(&text).map_err(|e| match e {
            PolygonError::Parse(p) => CliError::Input(format!("{}: {p}", path.display())),
            other => CliError::Input(format!("{}: {other}", path.display())),
        });
    }
    Ok(match cli.table.unwrap_or(Table::Square) {
        Table::Square => shapes::unit_square(),
        Table::Triangle => shapes::right_isosceles(),
        Table::Lshape => shapes::l_shape(),
    })
}

fn execute<S: Scalar>(cli: &Cli) -> Result<(Output, String), CliError> {
    let table = load_table::<S>(cli)?;
    let out = commands::run(cli, &table)?;
    Ok((out, write_polygon_text(&table)))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    billiards::scalar::set_float_tolerance(cli.tol);
    let (out, table_text) = match cli.backend {
        Backend::Exact => execute::<Rational>(cli)?,
        Backend::Float => execute::<f64>(cli)?,
    };
    let json_text = serde_json::to_string_pretty(&out.json).expect("serializable") + "\n";
    if let Some(path) = &cli.save_table {
        write_file(path, &table_text)?;
    }
    if let Some(path) = &cli.svg {
        write_file(path, &out.svg)?;
    }
    match cli.json.as_deref() {
        Some(p) if p == Path::new("-") => print!("{json_text}"),
        Some(p) => {
            write_file(p, &json_text)?;
            print!("{}", out.text);
        }
        None => print!("{}", out.text),
    }
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    let obj = json!({ "error": { "kind": e.kind(), "message": e.message(), "exit_code": e.code() } });
    eprintln!("{obj}");
    ExitCode::from(e.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Usage(e.render().to_string().trim().to_string()));
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
