use nalgebra::Point2;

use crate::basis::{Degree, NodeKind, ReferenceBasis, MAX_NODES};
use crate::mesh::{BoundaryLabel, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Vertex(usize),
    Edge(usize),
    Interior(usize),
}

impl DofKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DofKind::Vertex(_) => "vertex",
            DofKind::Edge(_) => "edge",
            DofKind::Interior(_) => "interior",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofInfo {
    pub kind: DofKind,
    pub position: Point2<f64>,
    /// Boundary parts the node lies on; empty for nodes inside Ω.
    pub boundary: Vec<BoundaryLabel>,
}

impl DofInfo {
    pub fn on_boundary(&self) -> bool {
        !self.boundary.is_empty()
    }
}

/// Global numbering of Lagrange nodes: mesh vertices first, then `k − 1`
/// nodes per edge (counted from the edge's lower-indexed vertex), then the
/// element-interior nodes.
#[derive(Debug, Clone)]
pub struct DofMap {
    degree: Degree,
    basis: ReferenceBasis,
    element_dofs: Vec<[usize; MAX_NODES]>,
    dofs: Vec<DofInfo>,
}

impl DofMap {
    pub fn new(mesh: &TriMesh, degree: Degree) -> Self {
        let k = degree.order();
        let basis = ReferenceBasis::new(degree);
        let nv = mesh.num_vertices();
        let per_edge = degree.nodes_per_edge();
        let per_element = degree.interior_nodes();
        let edge_base = nv;
        let interior_base = nv + mesh.num_edges() * per_edge;
        let total = interior_base + mesh.num_triangles() * per_element;

        let mut dofs: Vec<DofInfo> = Vec::with_capacity(total);
        for (v, p) in mesh.vertices().iter().enumerate() {
            dofs.push(DofInfo { kind: DofKind::Vertex(v), position: *p, boundary: Vec::new() });
        }
        for (e, edge) in mesh.edges().iter().enumerate() {
            let [a, b] = edge.vertices.map(|v| mesh.vertices()[v]);
            for j in 1..=per_edge {
                let s = j as f64 / k as f64;
                let position = Point2::from(a.coords * (1.0 - s) + b.coords * s);
                let boundary = edge.boundary.into_iter().collect();
                dofs.push(DofInfo { kind: DofKind::Edge(e), position, boundary });
            }
        }
        for (t, _) in mesh.triangles().iter().enumerate() {
            let [a, b, c] = mesh.triangle_vertices(t);
            for _ in 0..per_element {
                let position = Point2::from((a.coords + b.coords + c.coords) / 3.0);
                dofs.push(DofInfo { kind: DofKind::Interior(t), position, boundary: Vec::new() });
            }
        }
        for edge in mesh.edges().iter() {
            if let Some(label) = edge.boundary {
                for v in edge.vertices {
                    if !dofs[v].boundary.contains(&label) {
                        dofs[v].boundary.push(label);
                    }
                }
            }
        }
        for d in dofs.iter_mut() {
            d.boundary.sort();
        }

        let mut element_dofs = Vec::with_capacity(mesh.num_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let edges = mesh.triangle_edges(t);
            let mut map = [usize::MAX; MAX_NODES];
            for (local, kind) in basis.kinds().iter().enumerate() {
                map[local] = match *kind {
                    NodeKind::Vertex(i) => tri[i],
                    NodeKind::Edge { edge, position } => {
                        let global_edge = edges[edge];
                        let forward = tri[edge] == mesh.edges()[global_edge].vertices[0];
                        let offset = if forward { position - 1 } else { k - 1 - position };
                        edge_base + global_edge * per_edge + offset
                    }
                    NodeKind::Interior => {
                        let i = local - 3 - 3 * per_edge;
                        interior_base + t * per_element + i
                    }
                };
            }
            element_dofs.push(map);
        }

        DofMap { degree, basis, element_dofs, dofs }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    pub fn dofs(&self) -> &[DofInfo] {
        &self.dofs
    }

    pub fn info(&self, dof: usize) -> &DofInfo {
        &self.dofs[dof]
    }

    /// Local-to-global map of an element (length `N_k`).
    pub fn element_dofs(&self, element: usize) -> &[usize] {
        &self.element_dofs[element][..self.degree.num_nodes()]
    }

    /// Indices of DOFs strictly inside Ω.
    pub fn interior_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        self.dofs.iter().enumerate().filter(|(_, d)| !d.on_boundary()).map(|(i, _)| i)
    }
}

pub fn build_dof_map(mesh: &TriMesh, degree: Degree) -> DofMap {
    DofMap::new(mesh, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::ElementGeometry;
    use crate::mesh::build_structured_mesh;

    #[test]
    fn counts_on_structured_meshes() {
        let m2 = build_structured_mesh(2).unwrap();
        // Oracle: vertices + (k-1)·edges + interior nodes per triangle.
        let expected = |k: usize| m2.num_vertices() + (k - 1) * m2.num_edges() + (k - 1) * k.saturating_sub(2) / 2 * m2.num_triangles();
        assert_eq!(expected(1), 9);
        assert_eq!(expected(2), 25);
        assert_eq!(expected(3), 49);
        for d in Degree::ALL {
            assert_eq!(DofMap::new(&m2, d).len(), expected(d.order()));
        }
        for n in [1, 3, 5] {
            let m = build_structured_mesh(n).unwrap();
            for d in Degree::ALL {
                let k = d.order();
                assert_eq!(DofMap::new(&m, d).len(), (k * n + 1).pow(2));
            }
        }
    }

    #[test]
    fn shared_nodes_share_indices() {
        let mesh = build_structured_mesh(3).unwrap();
        for d in Degree::ALL {
            let dofs = DofMap::new(&mesh, d);
            let basis = dofs.basis().clone();
            for t in 0..mesh.num_triangles() {
                let g = ElementGeometry::new(&mesh, t).unwrap();
                for (local, &global) in dofs.element_dofs(t).iter().enumerate() {
                    let p = g.to_physical(basis.node(local));
                    assert!((p - dofs.info(global).position).norm() < 1e-14, "k={d} t={t} local={local}");
                }
            }
            let mut used = vec![false; dofs.len()];
            for t in 0..mesh.num_triangles() {
                for &g in dofs.element_dofs(t) {
                    used[g] = true;
                }
            }
            assert!(used.into_iter().all(|u| u));
        }
    }

    #[test]
    fn boundary_classification_is_geometric() {
        let mesh = build_structured_mesh(4).unwrap();
        let dofs = DofMap::new(&mesh, Degree::Cubic);
        for d in dofs.dofs() {
            let p = d.position;
            let geometric = p.x.abs() < 1e-12 || p.y.abs() < 1e-12 || (p.x - 1.0).abs() < 1e-12 || (p.y - 1.0).abs() < 1e-12;
            assert_eq!(d.on_boundary(), geometric);
        }
        let corner = dofs.dofs().iter().find(|d| d.position == Point2::new(0.0, 0.0)).unwrap();
        assert_eq!(corner.boundary, vec![BoundaryLabel::Left, BoundaryLabel::Bottom]);
        assert_eq!(dofs.interior_dofs().count(), (3 * 4 - 1usize).pow(2));
    }
}
