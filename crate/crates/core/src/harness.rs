//! End-to-end runs on the benchmark problems: solve, post-process, verify
//! and write CSV files.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Point2;

use crate::basis::Degree;
use crate::dual::{build_all_partitions, write_dual_csv};
use crate::error::{Error, Result};
use crate::mesh::build_structured_mesh;
use crate::pipeline::{Discretization, RunOptions};
use crate::postprocess::{polyline_fluxes, COMPATIBILITY_TOL, RANK_TOL};
use crate::problems::{load_example, ExampleSpec, DEFAULT_N};
use crate::verification::{compute_lce, convergence_study, elemental_conservation_report, lce_tolerance, Rate};

/// Bound on the relative elemental conservation residual.
pub const CONSERVATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Convergence,
    ExportDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checks {
    pub lce: bool,
    pub conservation: bool,
    pub convergence: bool,
}

impl Checks {
    pub const ALL: Checks = Checks { lce: true, conservation: true, convergence: true };
}

impl FromStr for Checks {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let none = Checks { lce: false, conservation: false, convergence: false };
        match s {
            "lce" => Ok(Checks { lce: true, ..none }),
            "conservation" => Ok(Checks { conservation: true, ..none }),
            "convergence" => Ok(Checks { convergence: true, ..none }),
            "all" => Ok(Checks::ALL),
            _ => Err(format!("unknown check '{s}' (expected lce, conservation, convergence or all)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub example: usize,
    pub degree: Degree,
    /// Cells per side of each mesh; empty means the command's default.
    pub levels: Vec<usize>,
    pub out_dir: Option<PathBuf>,
    pub checks: Checks,
    pub options: RunOptions,
    /// Overrides `1e-10 · max(1, ‖f‖_{L¹})`.
    pub tol_lce: Option<f64>,
    /// Polyline along which to report the recovered flux.
    pub flux_polyline: Option<Vec<Point2<f64>>>,
}

impl RunConfig {
    pub fn new(command: Command, example: usize, degree: Degree) -> Self {
        RunConfig {
            command,
            example,
            degree,
            levels: Vec::new(),
            out_dir: None,
            checks: Checks::ALL,
            options: RunOptions::default(),
            tol_lce: None,
            flux_polyline: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.levels.contains(&0) {
            return Err(Error::InvalidConfig("mesh levels must be at least 1".into()));
        }
        if let Some(tol) = self.tol_lce {
            if !(tol > 0.0) {
                return Err(Error::InvalidConfig(format!("LCE tolerance must be positive, got {tol}")));
            }
        }
        if self.flux_polyline.as_ref().is_some_and(|p| p.len() < 2) {
            return Err(Error::InvalidConfig("a flux polyline needs at least two points".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within { target: f64, window: f64 },
}

impl Bound {
    pub fn holds(self, value: f64) -> bool {
        match self {
            Bound::AtMost(t) => value <= t,
            Bound::AtLeast(t) => value >= t,
            Bound::Within { target, window } => (value - target).abs() <= window,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:.1e}"),
            Bound::AtLeast(t) => write!(f, ">= {t:.1e}"),
            Bound::Within { target, window } => write!(f, "in {target} ± {window}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        CheckOutcome { name: name.into(), value, bound, passed: bound.holds(value) }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {:.3e} {}", self.name, self.value, self.bound)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub checks: Vec<CheckOutcome>,
    /// Informational measurements that are not pass/fail.
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

struct Output<'a> {
    dir: Option<&'a Path>,
    files: Vec<PathBuf>,
}

impl Output<'_> {
    fn write(&mut self, name: &str, body: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
        if let Some(dir) = self.dir {
            let path = dir.join(name);
            body(BufWriter::new(File::create(&path)?))?;
            self.files.push(path);
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let example = load_example(config.example)?;
    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut out = Output { dir: config.out_dir.as_deref(), files: Vec::new() };
    let mut report = RunReport::default();
    match config.command {
        Command::Solve => {
            let levels = if config.levels.is_empty() { vec![DEFAULT_N] } else { config.levels.clone() };
            for &n in &levels {
                solve_level(config, &example, n, &mut out, &mut report)?;
            }
            if config.checks.convergence {
                if levels.len() >= 3 {
                    convergence(config, &example, &levels, &mut out, &mut report)?;
                } else {
                    report.notes.push(format!("convergence skipped: {} level(s), at least 3 needed", levels.len()));
                }
            }
        }
        Command::Convergence => {
            let levels = if config.levels.is_empty() { example.default_levels(config.degree) } else { config.levels.clone() };
            convergence(config, &example, &levels, &mut out, &mut report)?;
        }
        Command::ExportDual => {
            if config.out_dir.is_none() {
                return Err(Error::InvalidConfig("export-dual needs an output directory".into()));
            }
            let levels = if config.levels.is_empty() { vec![DEFAULT_N] } else { config.levels.clone() };
            for n in levels {
                let mesh = build_structured_mesh(n)?;
                let partitions = build_all_partitions(&mesh, config.degree)?;
                out.write(&format!("dual_k{}_n{n}.csv", config.degree), |w| write_dual_csv(&partitions, w))?;
                out.write(&format!("mesh_n{n}.txt"), |w| mesh.write_text(w))?;
            }
        }
    }
    report.files = out.files;
    Ok(report)
}

fn tag(example: &ExampleSpec, degree: Degree) -> String {
    format!("ex{}_k{}", example.id, degree)
}

fn solve_level(config: &RunConfig, example: &ExampleSpec, n: usize, out: &mut Output, report: &mut RunReport) -> Result<()> {
    let problem = &example.problem;
    let opts = &config.options;
    let disc = Discretization::structured(n, config.degree)?;
    let (u_h, tilde) = disc.solve_and_postprocess(problem, opts)?;
    let tag = format!("{}_n{n}", tag(example, config.degree));
    out.write(&format!("uh_{tag}.csv"), |w| u_h.write_csv(w))?;
    out.write(&format!("tilde_{tag}.csv"), |w| tilde.write_csv(w))?;

    if config.checks.lce {
        let raw = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &u_h, problem, opts)?;
        let post = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &tilde, problem, opts)?;
        out.write(&format!("lce_uh_{tag}.csv"), |w| raw.write_csv(w))?;
        out.write(&format!("lce_tilde_{tag}.csv"), |w| post.write_csv(w))?;
        let tol = config.tol_lce.unwrap_or(lce_tolerance(example.source_l1));
        report.checks.push(CheckOutcome::new(format!("max |LCE(ũ_h)| {tag}"), post.max_abs(), Bound::AtMost(tol)));
        report.notes.push(format!("max |LCE(u_h)| {tag}: {:.3e} (mean {:.3e})", raw.max_abs(), raw.mean_abs()));
    }

    if config.checks.conservation {
        let cons = elemental_conservation_report(&disc.mesh, &disc.partitions, &tilde, problem, opts)?;
        out.write(&format!("elem_{tag}.csv"), |w| cons.write_csv(w))?;
        report.checks.push(CheckOutcome::new(
            format!("elemental residual / scale {tag}"),
            cons.max_relative(),
            Bound::AtMost(CONSERVATION_TOL),
        ));
        let diag = tilde.diagnostics();
        let defect = diag.iter().map(|d| if d.scale > 0.0 { d.defect / d.scale } else { d.defect }).fold(0.0, f64::max);
        let rank = diag.iter().map(|d| d.sigma_second / d.norm).fold(f64::INFINITY, f64::min);
        report.checks.push(CheckOutcome::new(format!("compatibility |Σβ| / scale {tag}"), defect, Bound::AtMost(COMPATIBILITY_TOL)));
        report.checks.push(CheckOutcome::new(format!("σ₂(A) / ‖A‖ {tag}"), rank, Bound::AtLeast(RANK_TOL)));
        report.notes.push(format!("max raw-trace element imbalance {tag}: {:.3e}", cons.max_trace_residual()));
    }

    if let Some(polyline) = &config.flux_polyline {
        let segment_points = opts.segment_points.unwrap_or(config.degree.default_segment_points());
        let fluxes = polyline_fluxes(&tilde, problem, polyline, segment_points)?;
        out.write(&format!("flux_{tag}.csv"), |mut w| {
            use std::io::Write;
            writeln!(w, "x0,y0,x1,y1,flux")?;
            for f in &fluxes {
                writeln!(w, "{:e},{:e},{:e},{:e},{:e}", f.start.x, f.start.y, f.end.x, f.end.y, f.flux)?;
            }
            Ok(())
        })?;
        let total: f64 = fluxes.iter().map(|f| f.flux).sum();
        report.notes.push(format!("flux through polyline {tag}: {total:.12e}"));
    }
    Ok(())
}

fn convergence(config: &RunConfig, example: &ExampleSpec, levels: &[usize], out: &mut Output, report: &mut RunReport) -> Result<()> {
    let table = convergence_study(&example.problem, config.degree, levels, &config.options)?;
    let tag = tag(example, config.degree);
    out.write(&format!("conv_{tag}.csv"), |w| table.write_csv(w))?;
    let k = config.degree.order() as f64;
    let window = example.rate_window(config.degree);
    for (label, rate) in [("|u − u_h|", table.rate_uh()), ("|u − ũ_h|", table.rate_tilde())] {
        match rate {
            Rate::Slope(s) => report.checks.push(CheckOutcome::new(format!("H¹ slope {label} {tag}"), s, Bound::Within { target: k, window })),
            Rate::Exact => report.notes.push(format!("H¹ errors {label} {tag} at rounding level")),
        }
    }
    report.notes.push(format!("H¹ slope |u_h − ũ_h| {tag}: {}", table.rate_diff()));
    for r in &table.rows {
        report.notes.push(format!(
            "n={:<3} h={:.4e} |u−u_h|={:.4e} |u−ũ_h|={:.4e} |u_h−ũ_h|={:.4e}",
            r.n, r.h, r.err_uh, r.err_tilde, r.err_diff
        ));
    }
    Ok(())
}

/// Parses `x,y;x,y;...`.
pub fn parse_polyline(s: &str) -> Result<Vec<Point2<f64>>> {
    s.split(';')
        .map(|pair| {
            let mut it = pair.split(',').map(|v| v.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => Ok(Point2::new(x, y)),
                _ => Err(Error::InvalidConfig(format!("bad polyline point '{pair}' (expected x,y)"))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_checks() {
        assert_eq!("all".parse::<Checks>().unwrap(), Checks::ALL);
        let lce: Checks = "lce".parse().unwrap();
        assert!(lce.lce && !lce.conservation && !lce.convergence);
        assert!("everything".parse::<Checks>().is_err());
    }

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).holds(1.0));
        assert!(!Bound::AtLeast(2.0).holds(1.9));
        assert!(Bound::Within { target: 2.0, window: 0.15 }.holds(1.86));
        assert!(!Bound::Within { target: 2.0, window: 0.15 }.holds(2.2));
        assert!(!Bound::AtMost(1.0).holds(f64::NAN));
    }

    #[test]
    fn polyline_syntax() {
        let p = parse_polyline("0.5,0; 0.5,1").unwrap();
        assert_eq!(p, vec![Point2::new(0.5, 0.0), Point2::new(0.5, 1.0)]);
        assert!(parse_polyline("0.5;1,1").is_err());
    }

    #[test]
    fn solve_writes_deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = RunConfig::new(Command::Solve, 1, Degree::Quadratic);
        config.levels = vec![4];
        config.out_dir = Some(dir.path().to_path_buf());
        config.flux_polyline = Some(vec![Point2::new(0.5, 0.0), Point2::new(0.5, 1.0)]);
        let first = run(&config).unwrap();
        assert!(first.passed(), "{:?}", first.checks);
        assert_eq!(first.exit_code(), 0);
        let names: Vec<String> = first.files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        for expected in ["uh_ex1_k2_n4.csv", "tilde_ex1_k2_n4.csv", "lce_uh_ex1_k2_n4.csv", "lce_tilde_ex1_k2_n4.csv", "elem_ex1_k2_n4.csv", "flux_ex1_k2_n4.csv"] {
            assert!(names.iter().any(|n| n == expected), "missing {expected}");
        }
        let contents: Vec<Vec<u8>> = first.files.iter().map(|p| fs::read(p).unwrap()).collect();
        config.options.execution = crate::parallel::Execution::Serial;
        let second = run(&config).unwrap();
        for (p, c) in second.files.iter().zip(&contents) {
            assert_eq!(&fs::read(p).unwrap(), c, "{} differs", p.display());
        }
        assert!(first.notes.iter().any(|n| n.contains("convergence skipped")));
    }

    #[test]
    fn failed_checks_set_the_exit_code() {
        let mut config = RunConfig::new(Command::Solve, 1, Degree::Linear);
        config.levels = vec![3];
        config.checks = "lce".parse().unwrap();
        config.tol_lce = Some(1e-300);
        let report = run(&config).unwrap();
        assert_eq!(report.exit_code(), 1);
        assert!(report.checks[0].to_string().starts_with("FAIL"));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut config = RunConfig::new(Command::Solve, 4, Degree::Linear);
        assert!(matches!(run(&config), Err(Error::UnknownExample(4))));
        config.example = 1;
        config.levels = vec![0];
        assert!(matches!(run(&config), Err(Error::InvalidConfig(_))));
        let dual = RunConfig::new(Command::ExportDual, 1, Degree::Linear);
        assert!(matches!(run(&dual), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn exports_the_dual_mesh() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = RunConfig::new(Command::ExportDual, 1, Degree::Cubic);
        config.levels = vec![2];
        config.out_dir = Some(dir.path().to_path_buf());
        let report = run(&config).unwrap();
        let dual = fs::read_to_string(dir.path().join("dual_k3_n2.csv")).unwrap();
        assert!(dual.starts_with("x0,y0,x1,y1,class,element,local_dof\n"));
        assert_eq!(report.files.len(), 2);
    }
}
