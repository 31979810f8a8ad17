//! Piecewise-polynomial fields in the element Lagrange basis.

use nalgebra::{Point2, Vector2};

use crate::basis::{Degree, ReferenceBasis, MAX_NODES};
use crate::element::ElementGeometry;
use crate::mesh::TriMesh;

/// A field given on each element by `N_k` Lagrange coefficients.
pub trait ElementField: Sync {
    fn mesh(&self) -> &TriMesh;
    fn degree(&self) -> Degree;
    /// Coefficients of the element's local basis functions, in local node order.
    fn local_coefficients(&self, element: usize) -> [f64; MAX_NODES];
}

/// Evaluates one element's restriction of a field.
pub struct ElementEvaluator<'a> {
    pub geometry: ElementGeometry,
    basis: &'a ReferenceBasis,
    coefficients: [f64; MAX_NODES],
}

impl<'a> ElementEvaluator<'a> {
    pub fn new<F: ElementField + ?Sized>(field: &F, basis: &'a ReferenceBasis, element: usize) -> Self {
        let geometry = ElementGeometry::new(field.mesh(), element).expect("mesh elements are validated at construction");
        ElementEvaluator { geometry, basis, coefficients: field.local_coefficients(element) }
    }

    pub fn value_at_reference(&self, reference: Point2<f64>) -> f64 {
        let v = self.basis.eval(reference);
        v.values().iter().zip(&self.coefficients).map(|(a, c)| a * c).sum()
    }

    pub fn gradient_at_reference(&self, reference: Point2<f64>) -> Vector2<f64> {
        let v = self.basis.eval(reference);
        let g: Vector2<f64> = v.gradients().iter().zip(&self.coefficients).map(|(g, c)| g * *c).sum();
        self.geometry.physical_gradient(g)
    }

    pub fn value_at(&self, physical: Point2<f64>) -> f64 {
        self.value_at_reference(self.geometry.to_reference(physical))
    }

    pub fn gradient_at(&self, physical: Point2<f64>) -> Vector2<f64> {
        self.gradient_at_reference(self.geometry.to_reference(physical))
    }
}

/// Gradient of a field at a physical point inside `element`.
pub fn gradient_at<F: ElementField + ?Sized>(field: &F, element: usize, point: Point2<f64>) -> Vector2<f64> {
    let basis = ReferenceBasis::new(field.degree());
    ElementEvaluator::new(field, &basis, element).gradient_at(point)
}
