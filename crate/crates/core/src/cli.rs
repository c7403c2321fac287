//! Command-line front end.
//!
//! Every number printed here comes straight from the library routines; this
//! module only parses arguments and formats results.

use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::pooling::{parse_studies, pool, PoolMethod, PooledResult};
use crate::transform::{
    asin_sqrt_limit, ft_inverse_clamped, ft_inverse_raw, ft_transform, ft_transform_counts,
    limit_inverse, mpe, sample_size_for_mpe, theta_domain,
};
use crate::types::{AccuracyLevel, EffectiveSampleSize, StudyRecord, Theta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "ftmeta",
    version,
    about = "Double arcsine transform toolkit for proportions"
)]
struct Cli {
    /// Decimal places for numeric output.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u8).range(1..=17).map(usize::from))]
    precision: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward transform of a proportion or of event counts.
    Transform(TransformArgs),
    /// Back-transform an angle to a proportion.
    Inverse(InverseArgs),
    /// Pool studies read from CSV (`id,events,size`).
    Pool(PoolArgs),
    /// Maximum percent error of the large-sample approximation.
    #[command(allow_negative_numbers = true)]
    Mpe {
        #[arg(long)]
        n: f64,
    },
    /// Sample size achieving a target maximum percent error.
    #[command(allow_negative_numbers = true)]
    Samplesize {
        #[arg(long)]
        epsilon: f64,
    },
    /// Range of the forward transform at sample size n.
    #[command(allow_negative_numbers = true)]
    Domain {
        #[arg(long)]
        n: f64,
    },
    /// Curve data for plotting the transform or its inverse.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct TransformArgs {
    #[arg(long, requires = "size", conflicts_with_all = ["p", "n"])]
    events: Option<u64>,
    #[arg(long, requires = "events")]
    size: Option<u64>,
    #[arg(long, requires = "n")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    n: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct InverseArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    n: f64,
    /// Evaluate the closed form without clamping to the transform's range.
    #[arg(long, conflicts_with = "clamped")]
    raw: bool,
    /// Clamp to 0 below and 1 above the transform's range (default).
    #[arg(long)]
    clamped: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Fixed,
    Unweighted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct PoolArgs {
    /// Input CSV file, or `-` for standard input.
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// θ against p.
    Forward,
    /// p against θ.
    Inverse,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CurvesArgs {
    #[arg(long, value_enum)]
    figure: Figure,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Add the large-sample limiting curve.
    #[arg(long)]
    limit: bool,
}

/// Parameters for [`curve_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub figure: Figure,
    pub n_values: Vec<f64>,
    pub points: usize,
    pub include_limit: bool,
}

/// Column-labelled curve data. `None` marks a point where the closed-form
/// inverse is not real.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

fn validate_curves(req: &CurveRequest) -> Result<()> {
    if req.points < 2 {
        return Err(Error::domain(format!(
            "need at least 2 points, got {}",
            req.points
        )));
    }
    if req.n_values.is_empty() {
        return Err(Error::domain("no sample sizes given"));
    }
    for &n in &req.n_values {
        EffectiveSampleSize::new(n)?;
    }
    Ok(())
}

/// Builds the data behind the forward and inverse plots.
///
/// The forward grid covers `p ∈ [0, 1]` inclusive. The inverse grid covers
/// `(0, π/2)`, inset by half a step at each end to avoid the singularities of
/// the closed-form inverse.
pub fn curve_table(req: &CurveRequest) -> Result<CurveTable> {
    validate_curves(req)?;
    let points = req.points;
    let mut header = Vec::new();
    let mut rows = Vec::with_capacity(points);
    match req.figure {
        Figure::Forward => {
            header.push("p".to_string());
            header.extend(req.n_values.iter().map(|n| format!("theta_n{n}")));
            if req.include_limit {
                header.push("theta_limit".into());
            }
            for i in 0..points {
                let p = if i == points - 1 {
                    1.0
                } else {
                    i as f64 / (points - 1) as f64
                };
                let mut row = vec![Some(p)];
                for &n in &req.n_values {
                    row.push(Some(ft_transform(p, n)?.radians()));
                }
                if req.include_limit {
                    row.push(Some(asin_sqrt_limit(p)?.radians()));
                }
                rows.push(row);
            }
        }
        Figure::Inverse => {
            header.push("theta".to_string());
            header.extend(req.n_values.iter().map(|n| format!("pinv_raw_n{n}")));
            header.extend(req.n_values.iter().map(|n| format!("pinv_clamped_n{n}")));
            if req.include_limit {
                header.push("p_limit".into());
            }
            let sizes = req
                .n_values
                .iter()
                .map(|&n| EffectiveSampleSize::new(n))
                .collect::<Result<Vec<_>>>()?;
            let step = FRAC_PI_2 / points as f64;
            for i in 0..points {
                let theta = Theta::new((i as f64 + 0.5) * step)?;
                let mut row = vec![Some(theta.radians())];
                for &n in &sizes {
                    row.push(match ft_inverse_raw(theta, n) {
                        Ok(p) => Some(p),
                        Err(Error::UndefinedInverse { .. }) => None,
                        Err(e) => return Err(e),
                    });
                }
                for &n in &sizes {
                    row.push(Some(ft_inverse_clamped(theta, n)?));
                }
                if req.include_limit {
                    row.push(Some(limit_inverse(theta)));
                }
                rows.push(row);
            }
        }
    }
    Ok(CurveTable { header, rows })
}

/// Writes curve data as CSV, `NA` for undefined cells.
pub fn emit_curves<W: Write + ?Sized>(
    req: &CurveRequest,
    precision: usize,
    out: &mut W,
) -> Result<()> {
    let table = curve_table(req)?;
    let io = |e: io::Error| Error::domain(format!("write failed: {e}"));
    writeln!(out, "{}", table.header.join(",")).map_err(io)?;
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Some(v) => fmt_num(*v, precision),
                None => "NA".to_string(),
            })
            .collect();
        writeln!(out, "{}", cells.join(",")).map_err(io)?;
    }
    Ok(())
}

fn fmt_num(x: f64, precision: usize) -> String {
    format!("{x:.precision$}")
}

/// Percentage with one decimal, e.g. `0.02247` as `2.2%`.
pub fn fmt_percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
        }
    };
    match execute(cli, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(CliError::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn execute(
    cli: Cli,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let prec = cli.precision;
    match cli.command {
        Command::Transform(args) => {
            let theta = match (args.events, args.size, args.p, args.n) {
                (Some(x), Some(n), None, None) => {
                    ft_transform_counts(&StudyRecord::new("cli", x, n)?)?
                }
                (None, None, Some(p), Some(n)) => ft_transform(p, n)?,
                _ => {
                    return Err(
                        Error::domain("give either --events and --size, or --p and --n").into(),
                    )
                }
            };
            writeln!(out, "theta={}", fmt_num(theta.radians(), prec))?;
        }
        Command::Inverse(args) => {
            let theta = Theta::new(args.theta)?;
            let n = EffectiveSampleSize::new(args.n)?;
            let p = if args.raw {
                ft_inverse_raw(theta, n)?
            } else {
                ft_inverse_clamped(theta, n)?
            };
            writeln!(out, "p={}", fmt_num(p, prec))?;
        }
        Command::Pool(args) => {
            let set = if args.input.as_os_str() == "-" {
                parse_studies(stdin)?
            } else {
                let file = File::open(&args.input).map_err(|e| {
                    Error::Validation(format!("cannot open {}: {e}", args.input.display()))
                })?;
                parse_studies(file)?
            };
            let method = match args.method {
                MethodArg::Fixed => PoolMethod::FixedEffect,
                MethodArg::Unweighted => PoolMethod::Unweighted,
            };
            let result = pool(&set, method)?;
            match args.format {
                FormatArg::Json => {
                    serde_json::to_writer_pretty(&mut *out, &result).map_err(io::Error::from)?;
                    writeln!(out)?;
                }
                FormatArg::Csv => write_pool_csv(&result, &set_sizes(&set), prec, out)?,
            }
        }
        Command::Mpe { n } => {
            let delta = mpe(n)?;
            writeln!(
                out,
                "mpe={} approx={:.4} percent={}",
                fmt_num(delta, prec),
                delta,
                fmt_percent(delta)
            )?;
        }
        Command::Samplesize { epsilon } => {
            let size = sample_size_for_mpe(AccuracyLevel::new(epsilon)?);
            writeln!(out, "n={} n_real={}", size.n, fmt_num(size.n_real, prec))?;
        }
        Command::Domain { n } => {
            let d = theta_domain(n)?;
            writeln!(
                out,
                "[{}, {}]",
                fmt_num(d.lower, prec),
                fmt_num(d.upper, prec)
            )?;
        }
        Command::Curves(args) => {
            let req = CurveRequest {
                figure: args.figure,
                n_values: args.n,
                points: args.points,
                include_limit: args.limit,
            };
            emit_curves(&req, prec, out)?;
        }
    }
    Ok(())
}

fn set_sizes(set: &crate::pooling::StudySet) -> Vec<u64> {
    set.studies().iter().map(|s| s.size).collect()
}

fn write_pool_csv(
    result: &PooledResult,
    sizes: &[u64],
    prec: usize,
    out: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "n", "theta", "weight", "proportion"])?;
    for (study, &n) in result.per_study.iter().zip(sizes) {
        // Per-study proportion is the back-transform of its own θ at its own n.
        let p = ft_inverse_clamped(study.theta, EffectiveSampleSize::new(n as f64)?)?;
        w.write_record([
            study.study_id.clone(),
            n.to_string(),
            fmt_num(study.theta.radians(), prec),
            fmt_num(study.weight, prec),
            fmt_num(p, prec),
        ])?;
    }
    w.write_record([
        "POOLED".to_string(),
        fmt_num(result.effective_n.value(), prec),
        fmt_num(result.pooled_theta.radians(), prec),
        fmt_num(1.0, prec),
        fmt_num(result.pooled_proportion, prec),
    ])?;
    w.flush()?;
    Ok(())
}
