//! Command-line front end: curve I/O, ERM revenue computation, bound
//! evaluation, canned reproductions, and worst-case searches.
//!
//! Exit status: 0 on success, 1 when a reproduction reports `pass = false`,
//! 2 on usage, I/O, or computation errors. `ERM2_THREADS` caps worker
//! parallelism; when unset the thread count is automatic.

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use erm2::bounds;
use erm2::curve::RevenueCurve;
use erm2::erm;
use erm2::experiments;
use erm2::report::{Format, Report};

#[derive(Parser)]
#[command(name = "erm2", version, about = "Sample-based posted pricing on regular revenue curves")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expected ERM revenue on a curve, exact (n = 1 or 2) or Monte Carlo.
    Erm(ErmArgs),
    /// Evaluate the regional lower bounds at a given q*, or minimize them.
    Bounds(BoundsArgs),
    /// Run a canned reproduction and verify its targets.
    Reproduce(ReproduceArgs),
    /// Worst-case searches over curve families.
    Search(SearchArgs),
    /// Write a named constructor curve to a file.
    EmitCurve(EmitCurveArgs),
}

#[derive(Args)]
struct ErmArgs {
    /// Curve file ("q r" per line, '#' comments).
    #[arg(long)]
    curve: PathBuf,
    /// Number of samples.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Exact evaluation (requires n = 1 or 2). Default when n permits.
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    /// Monte Carlo evaluation.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Absolute quadrature tolerance for exact mode.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct BoundsArgs {
    /// Evaluate the combined bound at this q*.
    #[arg(long)]
    qstar: Option<f64>,
    /// Evaluate the both-below bound at this split parameter.
    #[arg(long)]
    delta: Option<f64>,
    /// Minimize the combined bound over q* (and report the optimal delta).
    #[arg(long)]
    minimize: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    which: Reproduction,
    /// Random curve count for the theorem sweep.
    #[arg(long, default_value_t = 500)]
    curves: usize,
    #[arg(long, default_value_t = 20260810)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reproduction {
    Prop1,
    Prop3,
    Switch,
    Theorem,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(value_enum)]
    family: SearchFamily,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchFamily {
    Triangular,
    Quadrilateral,
}

#[derive(Args)]
struct EmitCurveArgs {
    #[arg(value_enum)]
    shape: CurveShape,
    /// Peak quantile for triangular curves.
    #[arg(long)]
    qstar: Option<f64>,
    /// Truncation value for the equal-revenue curve.
    #[arg(long)]
    vmax: Option<f64>,
    /// Bump quantile for the quadrilateral curve.
    #[arg(long)]
    qb: Option<f64>,
    /// Bump revenue for the quadrilateral curve.
    #[arg(long)]
    rb: Option<f64>,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveShape {
    Triangular,
    TruncatedEqualRevenue,
    Quadrilateral,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ERM2_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return usage_error("ERM2_THREADS must be a positive integer"),
        }
    }
    let cli = Cli::parse();
    let format = cli.format.into();
    match run(cli.command, format) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn run(command: Command, format: Format) -> Result<ExitCode, String> {
    match command {
        Command::Erm(args) => {
            let text = std::fs::read_to_string(&args.curve)
                .map_err(|e| format!("{}: {e}", args.curve.display()))?;
            let curve = RevenueCurve::parse(&text)
                .map_err(|e| format!("{}: {e}", args.curve.display()))?;
            let use_mc = args.mc || (!args.exact && args.n > 2);
            let estimate = if use_mc {
                if args.trials == 0 {
                    return Err("mc mode requires --trials >= 1".into());
                }
                erm::erm_mc(&curve, args.n, args.trials, args.seed).map_err(stringify)?
            } else {
                match args.n {
                    1 => erm::erm1_exact(&curve),
                    2 => erm::erm2_exact(&curve, args.tol).map_err(stringify)?,
                    _ => return Err("exact mode requires n = 1 or 2 (use --mc for larger n)".into()),
                }
            };
            print!("{}", Report::from(&estimate).render(format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds(args) => {
            if args.minimize {
                let (q_star, _) = bounds::minimize_combined().map_err(stringify)?;
                let mut report = Report::from(&bounds::combined_bound(q_star).map_err(stringify)?);
                let (delta, delta_bound) = bounds::optimize_delta();
                report.push("optimal_delta", delta);
                report.push("optimal_delta_bound", delta_bound);
                print!("{}", report.render(format));
                return Ok(ExitCode::SUCCESS);
            }
            if let Some(delta) = args.delta {
                let bound_l = bounds::bound_l(delta).map_err(stringify)?;
                let report = if let Some(q_star) = args.qstar {
                    let combined = bounds::combined_bound(q_star).map_err(stringify)?;
                    let mut report = Report::from(&combined);
                    report.push("bound_l_at_delta", bound_l);
                    report
                } else {
                    let mut report = Report::new("bounds");
                    report.push("delta", delta);
                    report.push("bound_l", bound_l);
                    report
                };
                print!("{}", report.render(format));
                return Ok(ExitCode::SUCCESS);
            }
            let q_star = args
                .qstar
                .ok_or("bounds requires --qstar, --delta, or --minimize")?;
            let report = Report::from(&bounds::combined_bound(q_star).map_err(stringify)?);
            print!("{}", report.render(format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce(args) => {
            let experiment = match args.which {
                Reproduction::Prop1 => experiments::reproduce_prop1(),
                Reproduction::Prop3 => experiments::reproduce_prop3(),
                Reproduction::Switch => {
                    let (_, _, report) = experiments::find_switch_pair().map_err(stringify)?;
                    report
                }
                Reproduction::Theorem => experiments::theorem_check(args.curves, args.seed),
            };
            print!("{}", Report::from(&experiment).render(format));
            if experiment.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Search(args) => {
            match args.family {
                SearchFamily::Triangular => {
                    let (q_star, ratio) = experiments::triangular_worst_case(args.grid, args.tol);
                    let mut report = Report::new("triangular worst case");
                    report.push("q_star", q_star);
                    report.push("ratio", ratio);
                    print!("{}", report.render(format));
                    Ok(ExitCode::SUCCESS)
                }
                SearchFamily::Quadrilateral => {
                    let (q_star, _) = experiments::triangular_worst_case(args.grid, args.tol);
                    let experiment = experiments::quadrilateral_improves(q_star);
                    print!("{}", Report::from(&experiment).render(format));
                    if experiment.pass {
                        Ok(ExitCode::SUCCESS)
                    } else {
                        Ok(ExitCode::from(1))
                    }
                }
            }
        }
        Command::EmitCurve(args) => {
            let curve = match args.shape {
                CurveShape::Triangular => {
                    let q_star = args.qstar.ok_or("triangular requires --qstar")?;
                    RevenueCurve::triangular(q_star).map_err(stringify)?
                }
                CurveShape::TruncatedEqualRevenue => {
                    let vmax = args.vmax.ok_or("truncated-equal-revenue requires --vmax")?;
                    RevenueCurve::truncated_equal_revenue(vmax).map_err(stringify)?
                }
                CurveShape::Quadrilateral => {
                    let qb = args.qb.ok_or("quadrilateral requires --qb")?;
                    let rb = args.rb.ok_or("quadrilateral requires --rb")?;
                    RevenueCurve::quadrilateral(qb, rb).map_err(stringify)?
                }
            };
            std::fs::write(&args.out, curve.to_text())
                .map_err(|e| format!("{}: {e}", args.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn stringify<E: Display>(e: E) -> String {
    e.to_string()
}
