use clap::{Args, Parser, Subcommand};
use rollgeom::sweep::Execution;
use rollgeom::verify::{exit_code, list_targets, run_verify, Tolerances, VerifyRequest, REPORT_SCHEMA};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Residual checks for rolling maps and contact distributions.
#[derive(Parser)]
#[command(name = "rollcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a target and write its residual report.
    Verify(VerifyArgs),
    /// List registered targets with the identity each one checks.
    List,
    /// Print the report schema.
    ReportSchema,
}

#[derive(Args)]
struct VerifyArgs {
    /// Target id (see `list`), or `all`.
    #[arg(long)]
    target: String,
    /// Fixture name; repeat or separate with commas. Defaults per target.
    #[arg(long = "fixture", value_delimiter = ',')]
    fixtures: Vec<String>,
    /// Grid dimensions, e.g. `16x16` or `12x12x8`; a single count for random instances.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Dims>,
    /// Tolerance override: `<value>` for every check or `<name>=<value>` for one measure.
    #[arg(long)]
    tol: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter box `u0,u1,v0,v1[,w0,w1]`.
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    rect: Option<Bounds>,
    /// Evaluate grid points on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone)]
struct Dims(Vec<usize>);

#[derive(Clone)]
struct Bounds(Vec<(f64, f64)>);

fn parse_grid(s: &str) -> Result<Dims, String> {
    s.split(['x', 'X', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad grid {s:?}")))
        .collect::<Result<_, _>>()
        .map(Dims)
}

fn parse_rect(s: &str) -> Result<Bounds, String> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad box {s:?}")))
        .collect::<Result<_, _>>()?;
    if xs.is_empty() || xs.len() % 2 != 0 {
        return Err(format!("box needs pairs of bounds, got {} numbers", xs.len()));
    }
    Ok(Bounds(xs.chunks(2).map(|c| (c[0], c[1])).collect()))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn verify(args: VerifyArgs) -> Result<i32, String> {
    let req = VerifyRequest {
        target: args.target,
        fixtures: args.fixtures,
        grid: args.grid.map(|d| d.0),
        rect: args.rect.map(|b| b.0),
        tol: Tolerances::parse(&args.tol).map_err(|e| e.0)?,
        seed: args.seed,
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let report = run_verify(&req).map_err(|e| e.0)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| format!("writing {}: {e}", path.display()))?,
        None => emit(&json),
    }
    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    eprintln!("{}: {}", report.target, if report.pass { "PASS" } else { "FAIL" });
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => {
            emit(&(list_targets().join("\n") + "\n"));
            0
        }
        Command::ReportSchema => {
            emit(REPORT_SCHEMA);
            0
        }
        Command::Verify(args) => verify(args).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            2
        }),
    };
    ExitCode::from(code as u8)
}
