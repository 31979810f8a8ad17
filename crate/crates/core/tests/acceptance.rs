//! Acceptance gate. Every check prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use conservaflux::basis::{Degree, ReferenceBasis};
use conservaflux::cgfem::ProblemSpec;
use conservaflux::field::ElementEvaluator;
use conservaflux::harness::{Bound, CheckOutcome, CONSERVATION_TOL};
use conservaflux::parallel::Execution;
use conservaflux::pipeline::{Discretization, RunOptions};
use conservaflux::postprocess::{solve_elemental_with_gauge, ElementalAssembler, COMPATIBILITY_TOL, RANK_TOL};
use conservaflux::problems::{load_example, DEFAULT_N, EXAMPLE_IDS};
use conservaflux::verification::{compute_lce, convergence_study, elemental_conservation_report, h1_seminorm_error, lce_tolerance, Rate};
use nalgebra::{Point2, Vector2};

/// Prints every outcome and a summary line, then fails if any check failed.
fn gate(title: &str, outcomes: Vec<CheckOutcome>) {
    for o in &outcomes {
        println!("  {o}");
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.clone()).collect();
    println!("{} {title} ({} checks)", if failed.is_empty() { "PASS" } else { "FAIL" }, outcomes.len());
    assert!(failed.is_empty(), "{title}: failed {failed:?}");
}

fn options() -> RunOptions {
    RunOptions::default()
}

#[test]
fn lce_vanishes_after_postprocessing() {
    let mut outcomes = Vec::new();
    for id in EXAMPLE_IDS {
        let ex = load_example(id).unwrap();
        for k in Degree::ALL {
            let disc = Discretization::structured(DEFAULT_N, k).unwrap();
            let (_, tilde) = disc.solve_and_postprocess(&ex.problem, &options()).unwrap();
            let lce = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &tilde, &ex.problem, &options()).unwrap();
            assert!(!lce.entries.is_empty());
            outcomes.push(CheckOutcome::new(
                format!("max |LCE(ũ_h)| ex{id} k{k} n{DEFAULT_N}"),
                lce.max_abs(),
                Bound::AtMost(lce_tolerance(ex.source_l1)),
            ));
        }
    }
    gate("local conservation of the post-processed field", outcomes);
}

#[test]
fn lce_is_nonzero_before_postprocessing() {
    let ex = load_example(1).unwrap();
    let disc = Discretization::structured(8, Degree::Quadratic).unwrap();
    let u_h = disc.solve(&ex.problem, &options()).unwrap();
    let lce = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &u_h, &ex.problem, &options()).unwrap();
    gate(
        "non-conservation of the raw solution",
        vec![CheckOutcome::new("max |LCE(u_h)| ex1 k2 n8", lce.max_abs(), Bound::AtLeast(1e-6))],
    );
}

#[test]
fn elements_are_conservative() {
    let mut outcomes = Vec::new();
    for id in EXAMPLE_IDS {
        let ex = load_example(id).unwrap();
        for k in Degree::ALL {
            let disc = Discretization::structured(DEFAULT_N, k).unwrap();
            let (_, tilde) = disc.solve_and_postprocess(&ex.problem, &options()).unwrap();
            let report = elemental_conservation_report(&disc.mesh, &disc.partitions, &tilde, &ex.problem, &options()).unwrap();
            outcomes.push(CheckOutcome::new(
                format!("elemental residual / scale ex{id} k{k}"),
                report.max_relative(),
                Bound::AtMost(CONSERVATION_TOL),
            ));
        }
    }
    gate("elemental conservation", outcomes);
}

#[test]
fn elemental_systems_are_compatible_and_rank_deficient_by_one() {
    let mut outcomes = Vec::new();
    for id in EXAMPLE_IDS {
        let ex = load_example(id).unwrap();
        for k in Degree::ALL {
            let disc = Discretization::structured(DEFAULT_N, k).unwrap();
            let (_, tilde) = disc.solve_and_postprocess(&ex.problem, &options()).unwrap();
            let diag = tilde.diagnostics();
            let defect = diag.iter().map(|d| if d.scale > 0.0 { d.defect / d.scale } else { d.defect }).fold(0.0, f64::max);
            let rank = diag.iter().map(|d| d.sigma_second / d.norm).fold(f64::INFINITY, f64::min);
            outcomes.push(CheckOutcome::new(format!("|Σβ| / scale ex{id} k{k}"), defect, Bound::AtMost(COMPATIBILITY_TOL)));
            outcomes.push(CheckOutcome::new(format!("σ₂(A) / ‖A‖ ex{id} k{k}"), rank, Bound::AtLeast(RANK_TOL)));
        }
    }
    gate("compatibility and rank of elemental systems", outcomes);
}

#[test]
fn h1_errors_converge_at_optimal_rate() {
    let mut outcomes = Vec::new();
    for id in EXAMPLE_IDS {
        let ex = load_example(id).unwrap();
        for k in Degree::ALL {
            let levels = ex.default_levels(k);
            let table = convergence_study(&ex.problem, k, &levels, &options()).unwrap();
            let bound = Bound::Within { target: k.order() as f64, window: ex.rate_window(k) };
            for (label, rate) in [("|u − u_h|", table.rate_uh()), ("|u − ũ_h|", table.rate_tilde())] {
                let slope = rate.slope().unwrap_or(f64::NAN);
                outcomes.push(CheckOutcome::new(format!("H¹ slope {label} ex{id} k{k} levels {levels:?}"), slope, bound));
            }
        }
    }
    gate("optimal H¹ convergence", outcomes);
}

#[test]
fn error_indicator_is_second_order_for_linears() {
    let ex = load_example(1).unwrap();
    let levels = ex.default_levels(Degree::Linear);
    let table = convergence_study(&ex.problem, Degree::Linear, &levels, &options()).unwrap();
    let slope = table.rate_diff().slope().unwrap_or(f64::NAN);
    gate(
        "order of |u_h − ũ_h|",
        vec![CheckOutcome::new(format!("H¹ slope |u_h − ũ_h| ex1 k1 levels {levels:?}"), slope, Bound::AtLeast(1.8))],
    );
}

#[test]
fn exact_solution_satisfies_elemental_equations() {
    let mut outcomes = Vec::new();
    for id in [1, 2] {
        let ex = load_example(id).unwrap();
        let exact = ex.problem.exact.as_ref().unwrap();
        for k in Degree::ALL {
            let disc = Discretization::structured(16, k).unwrap();
            let assembler = ElementalAssembler::new(k, &options().postprocess()).unwrap();
            let worst = disc
                .partitions
                .iter()
                .flat_map(|p| assembler.true_solution_residual(p, &disc.mesh, exact, &ex.problem).unwrap())
                .fold(0.0, |m: f64, r| m.max(r.abs()));
            outcomes.push(CheckOutcome::new(format!("max true-solution residual ex{id} k{k} n16"), worst, Bound::AtMost(1e-8)));
        }
    }
    gate("true solution in the elemental equations", outcomes);
}

fn polynomial_problem(k: Degree) -> ProblemSpec {
    match k {
        Degree::Linear => ProblemSpec::new(|_| 1.0, |_| 0.0)
            .with_dirichlet_everywhere(|p| 1.0 + 2.0 * p.x - 3.0 * p.y)
            .with_exact(|p| 1.0 + 2.0 * p.x - 3.0 * p.y, |_| Vector2::new(2.0, -3.0)),
        Degree::Quadratic => {
            let u = |p: Point2<f64>| p.x * p.x - p.x * p.y + 0.5 * p.y * p.y + p.x;
            ProblemSpec::new(|_| 1.0, |_| -3.0)
                .with_dirichlet_everywhere(u)
                .with_exact(u, |p| Vector2::new(2.0 * p.x - p.y + 1.0, -p.x + p.y))
        }
        Degree::Cubic => {
            let u = |p: Point2<f64>| p.x * p.x * p.x - 2.0 * p.x * p.y * p.y + p.y * p.y;
            // Δu = 6x − 4x + 2.
            ProblemSpec::new(|_| 1.0, |p| -(2.0 * p.x + 2.0))
                .with_dirichlet_everywhere(u)
                .with_exact(u, |p| Vector2::new(3.0 * p.x * p.x - 2.0 * p.y * p.y, -4.0 * p.x * p.y + 2.0 * p.y))
        }
    }
}

#[test]
fn polynomial_solutions_are_reproduced() {
    let mut outcomes = Vec::new();
    for k in Degree::ALL {
        let problem = polynomial_problem(k);
        let grad = problem.exact.as_ref().unwrap().gradient.clone();
        let disc = Discretization::structured(4, k).unwrap();
        let (u_h, tilde) = disc.solve_and_postprocess(&problem, &options()).unwrap();
        let err = h1_seminorm_error(&u_h, |p| grad(p), None, Execution::Serial).unwrap();
        outcomes.push(CheckOutcome::new(format!("|u − u_h|_H¹ for u ∈ P{k}"), err, Bound::AtMost(1e-9)));

        let basis = ReferenceBasis::new(k);
        let samples: Vec<Point2<f64>> =
            (0..=6).flat_map(|i| (0..=6 - i).map(move |j| Point2::new(i as f64 / 6.0, j as f64 / 6.0))).collect();
        let mut worst: f64 = 0.0;
        for t in 0..disc.mesh.num_triangles() {
            let eval = ElementEvaluator::new(&tilde, &basis, t);
            for &q in &samples {
                let x = eval.geometry.to_physical(q);
                worst = worst.max((eval.gradient_at_reference(q) - grad(x)).amax());
            }
        }
        outcomes.push(CheckOutcome::new(format!("max |∇ũ_h − ∇u| for u ∈ P{k}"), worst, Bound::AtMost(1e-9)));
    }
    gate("exactness on polynomial solutions", outcomes);
}

#[test]
fn geometry_gauge_and_determinism() {
    let mut outcomes = Vec::new();
    let ex = load_example(2).unwrap();
    for k in Degree::ALL {
        let disc = Discretization::structured(DEFAULT_N, k).unwrap();

        let subcell_gap = disc
            .partitions
            .iter()
            .map(|p| {
                let area = disc.mesh.area(p.element);
                (p.cells.iter().map(|c| c.area).sum::<f64>() - area).abs() / area
            })
            .fold(0.0, f64::max);
        outcomes.push(CheckOutcome::new(format!("subcell area gap (relative) k{k}"), subcell_gap, Bound::AtMost(1e-13)));

        let cv_total: f64 = (0..disc.cv.len()).map(|d| disc.cv.area(d)).sum();
        outcomes.push(CheckOutcome::new(format!("|Σ CV areas − |Ω|| k{k}"), (cv_total - 1.0).abs(), Bound::AtMost(1e-12)));

        let opts = options();
        let u_h = disc.solve(&ex.problem, &opts).unwrap();
        let assembler = ElementalAssembler::new(k, &opts.postprocess()).unwrap();
        let basis = ReferenceBasis::new(k);
        let mut gauge_gap: f64 = 0.0;
        for part in &disc.partitions {
            let system = assembler.assemble(part, &u_h, &ex.problem).unwrap();
            let a = solve_elemental_with_gauge(&system, 0.0).unwrap().alpha;
            let b = solve_elemental_with_gauge(&system, 3.75).unwrap().alpha;
            let geometry = conservaflux::element::ElementGeometry::new(&disc.mesh, part.element).unwrap();
            for q in [Point2::new(1.0 / 3.0, 1.0 / 3.0), Point2::new(0.1, 0.7), Point2::new(0.6, 0.2)] {
                let v = basis.eval(q);
                let g: Vector2<f64> = v.gradients().iter().zip(a.iter().zip(b.iter())).map(|(g, (x, y))| g * (x - y)).sum();
                gauge_gap = gauge_gap.max(geometry.physical_gradient(g).amax());
            }
        }
        outcomes.push(CheckOutcome::new(format!("max |∇ũ_h(gauge 0) − ∇ũ_h(gauge 3.75)| k{k}"), gauge_gap, Bound::AtMost(1e-12)));

        let serial = RunOptions { execution: Execution::Serial, ..opts };
        let parallel = RunOptions { execution: Execution::Parallel, ..opts };
        let a = disc.postprocess(&u_h, &ex.problem, &serial).unwrap();
        let b = disc.postprocess(&u_h, &ex.problem, &parallel).unwrap();
        let mismatches = (0..disc.mesh.num_triangles())
            .filter(|&t| {
                let same_alpha = a.alpha(t).iter().zip(b.alpha(t)).all(|(x, y)| x.to_bits() == y.to_bits());
                let same_flux = a.boundary_flux(t).iter().zip(b.boundary_flux(t)).all(|(x, y)| x.to_bits() == y.to_bits());
                !(same_alpha && same_flux)
            })
            .count();
        outcomes.push(CheckOutcome::new(format!("elements differing serial vs parallel k{k}"), mismatches as f64, Bound::AtMost(0.0)));
    }
    gate("geometry, gauge invariance and determinism", outcomes);
}

#[test]
fn exact_columns_report_no_slope() {
    let problem = polynomial_problem(Degree::Quadratic);
    let table = convergence_study(&problem, Degree::Quadratic, &[2, 4, 8], &options()).unwrap();
    assert_eq!(table.rate_uh(), Rate::Exact);
    assert_eq!(table.rate_tilde(), Rate::Exact);
    println!("PASS polynomial convergence columns reported as exact");
}
