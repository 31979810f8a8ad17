//! Evaluates the Lagrange basis on the reference triangle and checks the
//! partition of unity at a sample point.

use conservaflux::basis::{Degree, ReferenceBasis};
use nalgebra::Point2;

fn main() {
    let p = Point2::new(0.2, 0.3);
    for k in Degree::ALL {
        let basis = ReferenceBasis::new(k);
        let v = basis.eval(p);
        let sum: f64 = v.values().iter().sum();
        let grad_sum = v.gradients().iter().fold(nalgebra::Vector2::zeros(), |a, g| a + g);
        println!("P{k}: {} nodes, Σφ = {sum:.15}, |Σ∇φ| = {:.1e}", basis.len(), grad_sum.norm());
        for i in 0..basis.len() {
            println!("  node {i} at {:?} ({:?})", basis.node(i).coords.as_slice(), basis.kinds()[i]);
        }
    }
}
