use std::io::Write;

use super::DofMap;
use crate::basis::{Degree, MAX_NODES};
use crate::error::Result;
use crate::field::ElementField;
use crate::mesh::TriMesh;

/// A continuous finite element function: one coefficient per global DOF,
/// equal to the field's value at that node.
#[derive(Debug, Clone)]
pub struct FemField<'a> {
    mesh: &'a TriMesh,
    dofs: &'a DofMap,
    coefficients: Vec<f64>,
}

impl<'a> FemField<'a> {
    pub fn new(mesh: &'a TriMesh, dofs: &'a DofMap, coefficients: Vec<f64>) -> Self {
        assert_eq!(coefficients.len(), dofs.len(), "one coefficient per DOF");
        FemField { mesh, dofs, coefficients }
    }

    /// Nodal interpolant of `u`.
    pub fn interpolate(mesh: &'a TriMesh, dofs: &'a DofMap, u: impl Fn(nalgebra::Point2<f64>) -> f64) -> Self {
        let coefficients = dofs.dofs().iter().map(|d| u(d.position)).collect();
        FemField { mesh, dofs, coefficients }
    }

    pub fn dofs(&self) -> &'a DofMap {
        self.dofs
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Writes `dof_index,x,y,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dof_index,x,y,value")?;
        for (i, (d, v)) in self.dofs.dofs().iter().zip(&self.coefficients).enumerate() {
            writeln!(out, "{i},{:e},{:e},{:e}", d.position.x, d.position.y, v)?;
        }
        Ok(())
    }
}

impl ElementField for FemField<'_> {
    fn mesh(&self) -> &TriMesh {
        self.mesh
    }

    fn degree(&self) -> Degree {
        self.dofs.degree()
    }

    fn local_coefficients(&self, element: usize) -> [f64; MAX_NODES] {
        let mut out = [0.0; MAX_NODES];
        for (slot, &g) in out.iter_mut().zip(self.dofs.element_dofs(element)) {
            *slot = self.coefficients[g];
        }
        out
    }
}
