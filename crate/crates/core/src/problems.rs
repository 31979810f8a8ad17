//! The three benchmark problems on the unit square.
//!
//! 1. `κ = 1`, `u = (x − x²)(y − y²)`, homogeneous Dirichlet data.
//! 2. `κ = e^{2x − y²}`, `f = −eˣ`, `u = e^{−x + y²}` with Dirichlet data from `u`.
//! 3. `κ = 1 / ((1 − 0.8 sin 6πx)(1 − 0.8 sin 6πy))`, `f = 0`, `u = 1` on the
//!    left side, `u = 0` on the right, no flux through top and bottom.

use std::f64::consts::PI;

use nalgebra::{Point2, Vector2};

use crate::basis::Degree;
use crate::cgfem::ProblemSpec;
use crate::error::{Error, Result};
use crate::mesh::BoundaryLabel;

#[derive(Debug, Clone)]
pub struct ExampleSpec {
    pub id: usize,
    pub problem: ProblemSpec,
    /// `‖f‖_{L¹(Ω)}` in closed form.
    pub source_l1: f64,
}

impl ExampleSpec {
    /// Mesh sizes of the default convergence ladder.
    pub fn default_levels(&self, degree: Degree) -> Vec<usize> {
        match (self.id, degree) {
            (3, Degree::Linear) => vec![24, 48, 96],
            (3, Degree::Quadratic) => vec![12, 24, 48],
            (3, Degree::Cubic) => vec![6, 12, 24],
            (_, Degree::Linear) => vec![8, 16, 32, 64],
            (_, Degree::Quadratic) => vec![4, 8, 16, 32],
            (_, Degree::Cubic) => vec![4, 8, 16],
        }
    }

    /// Allowed distance of an H¹ convergence slope from `k`.
    pub fn rate_window(&self, degree: Degree) -> f64 {
        if self.id == 3 || degree == Degree::Cubic {
            0.2
        } else {
            0.15
        }
    }

    pub fn exact_value(&self, p: Point2<f64>) -> f64 {
        (self.problem.exact.as_ref().expect("examples carry exact solutions").value)(p)
    }

    pub fn exact_gradient(&self, p: Point2<f64>) -> Vector2<f64> {
        (self.problem.exact.as_ref().expect("examples carry exact solutions").gradient)(p)
    }
}

/// Mesh size used for single-mesh runs.
pub const DEFAULT_N: usize = 8;

pub const EXAMPLE_IDS: [usize; 3] = [1, 2, 3];

fn example_one() -> ProblemSpec {
    let u = |p: Point2<f64>| (p.x - p.x * p.x) * (p.y - p.y * p.y);
    ProblemSpec::new(|_| 1.0, |p| 2.0 * (p.y - p.y * p.y) + 2.0 * (p.x - p.x * p.x))
        .with_dirichlet_everywhere(|_| 0.0)
        .with_exact(u, |p| Vector2::new((1.0 - 2.0 * p.x) * (p.y - p.y * p.y), (p.x - p.x * p.x) * (1.0 - 2.0 * p.y)))
}

fn example_two() -> ProblemSpec {
    let u = |p: Point2<f64>| (p.y * p.y - p.x).exp();
    ProblemSpec::new(|p| (2.0 * p.x - p.y * p.y).exp(), |p| -p.x.exp())
        .with_dirichlet_everywhere(u)
        .with_exact(u, move |p| {
            let v = u(p);
            Vector2::new(-v, 2.0 * p.y * v)
        })
}

fn example_three() -> ProblemSpec {
    let s = |t: f64| 1.0 - 0.8 * (6.0 * PI * t).sin();
    ProblemSpec::new(move |p| 1.0 / (s(p.x) * s(p.y)), |_| 0.0)
        .with_dirichlet(BoundaryLabel::Left, |_| 1.0)
        .with_dirichlet(BoundaryLabel::Right, |_| 0.0)
        .with_neumann(BoundaryLabel::Top)
        .with_neumann(BoundaryLabel::Bottom)
        .with_exact(
            |p| 1.0 - (2.0 * (6.0 * PI * p.x).cos() + 15.0 * PI * p.x - 2.0) / (15.0 * PI),
            |p| Vector2::new(0.8 * (6.0 * PI * p.x).sin() - 1.0, 0.0),
        )
}

pub fn load_example(id: usize) -> Result<ExampleSpec> {
    let (problem, source_l1) = match id {
        1 => (example_one(), 2.0 / 3.0),
        2 => (example_two(), std::f64::consts::E - 1.0),
        3 => (example_three(), 0.0),
        _ => return Err(Error::UnknownExample(id)),
    };
    Ok(ExampleSpec { id, problem, source_l1 })
}
