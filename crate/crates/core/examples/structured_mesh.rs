//! Builds a structured mesh and prints its size, edge counts and boundary labels.

use conservaflux::mesh::{build_structured_mesh, BoundaryLabel};

fn main() -> conservaflux::Result<()> {
    let mesh = build_structured_mesh(4)?;
    println!("vertices {} triangles {} edges {} h {:.4}", mesh.num_vertices(), mesh.num_triangles(), mesh.num_edges(), mesh.h());
    for label in BoundaryLabel::ALL {
        let count = mesh.boundary_edges().filter(|(_, e)| e.boundary == Some(label)).count();
        println!("{label:>6}: {count} edges");
    }
    let total: f64 = (0..mesh.num_triangles()).map(|t| mesh.area(t)).sum();
    println!("total area {total}");
    Ok(())
}
