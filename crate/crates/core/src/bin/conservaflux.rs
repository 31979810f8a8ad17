use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conservaflux::harness::{parse_polyline, run, Checks, Command, RunConfig};
use conservaflux::parallel::Execution;
use conservaflux::Degree;

/// CG solver with conservative flux recovery on the benchmark problems.
#[derive(Parser)]
#[command(name = "conservaflux", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve, post-process and check conservation on one or more meshes.
    Solve(Common),
    /// Tabulate H¹ errors over a mesh ladder and check the rates.
    Convergence(Common),
    /// Write the control-volume segments of the element partitions.
    ExportDual(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    example: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    degree: u8,
    /// Cells per side of a single mesh.
    #[arg(long, conflicts_with = "levels")]
    n: Option<usize>,
    /// Comma-separated cells per side, e.g. 8,16,32.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    #[arg(long, default_value = "all")]
    check: Checks,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quad_exactness: Option<usize>,
    #[arg(long)]
    segment_points: Option<usize>,
    #[arg(long)]
    tol_lce: Option<f64>,
    /// Report the recovered flux through `x,y;x,y;...`.
    #[arg(long)]
    flux_polyline: Option<String>,
    /// Run element loops on one thread.
    #[arg(long)]
    serial: bool,
}

fn config(command: Command, args: Common) -> conservaflux::Result<RunConfig> {
    let degree = Degree::try_from(args.degree as usize)?;
    let mut cfg = RunConfig::new(command, args.example as usize, degree);
    cfg.levels = args.n.map(|n| vec![n]).unwrap_or(args.levels);
    cfg.out_dir = args.out;
    cfg.checks = args.check;
    cfg.options.quad_exactness = args.quad_exactness;
    cfg.options.segment_points = args.segment_points;
    cfg.options.execution = if args.serial { Execution::Serial } else { Execution::Parallel };
    cfg.tol_lce = args.tol_lce;
    cfg.flux_polyline = args.flux_polyline.as_deref().map(parse_polyline).transpose()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::Convergence(a) => (Command::Convergence, a),
        Sub::ExportDual(a) => (Command::ExportDual, a),
    };
    let report = match config(command, args).and_then(|cfg| run(&cfg)) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for check in &report.checks {
        println!("{check}");
    }
    for note in &report.notes {
        println!("  {note}");
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    ExitCode::from(report.exit_code() as u8)
}
