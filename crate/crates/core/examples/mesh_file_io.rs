//! Writes a mesh in the plain-text format, reads it back and solves on it.

use std::io::BufReader;

use conservaflux::basis::Degree;
use conservaflux::mesh::{build_structured_mesh, TriMesh};
use conservaflux::pipeline::{Discretization, RunOptions};
use conservaflux::problems::load_example;
use conservaflux::verification::compute_lce;

fn main() -> conservaflux::Result<()> {
    let mut text = Vec::new();
    build_structured_mesh(3)?.write_text(&mut text)?;
    print!("{}", String::from_utf8_lossy(&text));

    let mesh = TriMesh::read_text(BufReader::new(text.as_slice()))?;
    let ex = load_example(1)?;
    let opts = RunOptions::default();
    let disc = Discretization::new(mesh, Degree::Cubic)?;
    let (_, tilde) = disc.solve_and_postprocess(&ex.problem, &opts)?;
    let lce = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &tilde, &ex.problem, &opts)?;
    println!("read mesh: {} triangles, max |LCE(ũ_h)| {:.3e}", disc.mesh.num_triangles(), lce.max_abs());
    Ok(())
}
