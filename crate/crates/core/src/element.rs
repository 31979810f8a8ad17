//! Affine maps from the reference triangle to mesh elements.

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub element: usize,
    pub vertices: [Point2<f64>; 3],
    /// Columns are `v1 − v0` and `v2 − v0`.
    pub jacobian: Matrix2<f64>,
    pub det: f64,
    /// `J^{-T}`: maps reference gradients to physical ones.
    pub inverse_transpose: Matrix2<f64>,
}

impl ElementGeometry {
    pub fn new(mesh: &TriMesh, element: usize) -> Result<Self> {
        mesh.check_triangle(element)?;
        let vertices = mesh.triangle_vertices(element);
        let [a, b, c] = vertices;
        let jacobian = Matrix2::from_columns(&[b - a, c - a]);
        let det = jacobian.determinant();
        let diam = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        if det.abs() < 1e-14 * diam * diam || !det.is_finite() {
            return Err(Error::DegenerateTriangle { element, det });
        }
        let inverse = Matrix2::new(jacobian[(1, 1)], -jacobian[(0, 1)], -jacobian[(1, 0)], jacobian[(0, 0)]) / det;
        Ok(ElementGeometry { element, vertices, jacobian, det, inverse_transpose: inverse.transpose() })
    }

    pub fn abs_det(&self) -> f64 {
        self.det.abs()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn to_physical(&self, reference: Point2<f64>) -> Point2<f64> {
        self.vertices[0] + self.jacobian * reference.coords
    }

    pub fn to_reference(&self, physical: Point2<f64>) -> Point2<f64> {
        Point2::from(self.inverse_transpose.transpose() * (physical - self.vertices[0]))
    }

    pub fn physical_gradient(&self, reference_gradient: Vector2<f64>) -> Vector2<f64> {
        self.inverse_transpose * reference_gradient
    }

    /// Outward unit normal of local edge `e` (from vertex `e` to `e + 1`).
    pub fn edge_normal(&self, e: usize) -> Vector2<f64> {
        let d = self.vertices[(e + 1) % 3] - self.vertices[e];
        Vector2::new(d.y, -d.x).normalize()
    }

    /// Whether the physical point lies in the closed triangle, up to `tol` in
    /// barycentric coordinates.
    pub fn contains(&self, physical: Point2<f64>, tol: f64) -> bool {
        let r = self.to_reference(physical);
        r.x >= -tol && r.y >= -tol && r.x + r.y <= 1.0 + tol
    }
}

/// Physical point, Jacobian and `|det J|` of the affine map at a reference point.
pub fn map_to_element(mesh: &TriMesh, triangle: usize, reference: Point2<f64>) -> Result<(Point2<f64>, Matrix2<f64>, f64)> {
    let g = ElementGeometry::new(mesh, triangle)?;
    Ok((g.to_physical(reference), g.jacobian, g.abs_det()))
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::basis::{Degree, ReferenceBasis};
    use crate::mesh::build_structured_mesh;
    use crate::quadrature::triangle_rule;

    #[test]
    fn vertices_and_barycenter() {
        let mesh = build_structured_mesh(3).unwrap();
        for t in 0..mesh.num_triangles() {
            let (p, _, det) = map_to_element(&mesh, t, Point2::origin()).unwrap();
            let verts = mesh.triangle_vertices(t);
            assert_eq!(p, verts[0]);
            assert!((det - 2.0 * mesh.area(t)).abs() < 1e-15);
            let (c, _, _) = map_to_element(&mesh, t, Point2::new(1.0 / 3.0, 1.0 / 3.0)).unwrap();
            let bary = Point2::from((verts[0].coords + verts[1].coords + verts[2].coords) / 3.0);
            assert!((c - bary).norm() < 1e-15);
        }
        assert!(map_to_element(&mesh, 1000, Point2::origin()).is_err());
    }

    #[test]
    fn unit_right_triangle_is_identity() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let mesh = TriMesh::new(v, vec![[0, 1, 2]], &HashMap::new()).unwrap();
        let (_, j, det) = map_to_element(&mesh, 0, Point2::new(0.2, 0.3)).unwrap();
        assert_eq!(j, Matrix2::identity());
        assert_eq!(det, 1.0);
    }

    #[test]
    fn round_trip_and_partition_of_unity_integral() {
        let v = vec![Point2::new(0.1, 0.2), Point2::new(1.3, 0.4), Point2::new(0.5, 1.1)];
        let mesh = TriMesh::new(v, vec![[0, 1, 2]], &HashMap::new()).unwrap();
        let g = ElementGeometry::new(&mesh, 0).unwrap();
        let p = Point2::new(0.25, 0.4);
        assert!((g.to_reference(g.to_physical(p)) - p).norm() < 1e-15);
        for d in Degree::ALL {
            let basis = ReferenceBasis::new(d);
            let rule = triangle_rule(d.default_exactness()).unwrap();
            let total: f64 = rule
                .iter()
                .map(|(q, w)| w * g.abs_det() * basis.eval(q).values().iter().sum::<f64>())
                .sum();
            assert!((total - mesh.area(0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_sliver() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 1e-16)];
        let mesh = TriMesh::new(v, vec![[0, 1, 2]], &HashMap::new()).unwrap();
        assert!(matches!(ElementGeometry::new(&mesh, 0), Err(Error::DegenerateTriangle { .. })));
    }
}
