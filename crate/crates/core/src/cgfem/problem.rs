use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Point2, Vector2};

use crate::mesh::BoundaryLabel;

pub type ScalarFn = Arc<dyn Fn(Point2<f64>) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point2<f64>) -> Vector2<f64> + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Dirichlet(ScalarFn),
    /// Zero normal flux; contributes nothing to the load.
    HomogeneousNeumann,
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Dirichlet(_) => f.write_str("Dirichlet(..)"),
            BoundaryCondition::HomogeneousNeumann => f.write_str("HomogeneousNeumann"),
        }
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarFn,
    pub gradient: VectorFn,
}

/// Data of `−∇·(κ∇u) = f` with conditions on labelled boundary parts.
#[derive(Clone)]
pub struct ProblemSpec {
    pub kappa: ScalarFn,
    pub source: ScalarFn,
    pub boundary: BTreeMap<BoundaryLabel, BoundaryCondition>,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("boundary", &self.boundary)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        kappa: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
        source: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec { kappa: Arc::new(kappa), source: Arc::new(source), boundary: BTreeMap::new(), exact: None }
    }

    pub fn with_dirichlet(mut self, label: BoundaryLabel, g: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary.insert(label, BoundaryCondition::Dirichlet(Arc::new(g)));
        self
    }

    /// Same Dirichlet data on every boundary part.
    pub fn with_dirichlet_everywhere(mut self, g: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static) -> Self {
        let g: ScalarFn = Arc::new(g);
        for label in BoundaryLabel::ALL {
            self.boundary.insert(label, BoundaryCondition::Dirichlet(g.clone()));
        }
        self
    }

    pub fn with_neumann(mut self, label: BoundaryLabel) -> Self {
        self.boundary.insert(label, BoundaryCondition::HomogeneousNeumann);
        self
    }

    pub fn with_exact(
        mut self,
        value: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point2<f64>) -> Vector2<f64> + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(ExactSolution { value: Arc::new(value), gradient: Arc::new(gradient) });
        self
    }

    pub fn kappa(&self, p: Point2<f64>) -> f64 {
        (self.kappa)(p)
    }

    pub fn source(&self, p: Point2<f64>) -> f64 {
        (self.source)(p)
    }

    pub fn condition(&self, label: BoundaryLabel) -> Option<&BoundaryCondition> {
        self.boundary.get(&label)
    }

    /// Dirichlet datum for a node on the given boundary parts: the first
    /// Dirichlet part in label order wins.
    pub fn dirichlet_value(&self, parts: &[BoundaryLabel], p: Point2<f64>) -> Option<f64> {
        parts.iter().find_map(|l| match self.boundary.get(l) {
            Some(BoundaryCondition::Dirichlet(g)) => Some(g(p)),
            _ => None,
        })
    }
}
