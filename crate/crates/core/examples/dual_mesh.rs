//! Prints the subcell partition of one element and writes the dual segments
//! of a small mesh to stdout as CSV.

use conservaflux::basis::Degree;
use conservaflux::dual::{build_subcell_partition, write_dual_csv};
use conservaflux::mesh::build_structured_mesh;

fn main() -> conservaflux::Result<()> {
    let mesh = build_structured_mesh(2)?;
    let part = build_subcell_partition(&mesh, 0, Degree::Quadratic)?;
    println!("element 0 area {:.6}", mesh.area(0));
    for cell in &part.cells {
        println!(
            "  node {} at ({:.3}, {:.3}): area {:.6}, {} CV segments, {} boundary segments",
            cell.local_dof,
            cell.node.x,
            cell.node.y,
            cell.area,
            cell.cv_segments().count(),
            cell.boundary_segments().count()
        );
    }
    write_dual_csv(&[part], std::io::stdout().lock())
}
