//! Solves a variable-coefficient problem with CG and reports the H¹ error.

use conservaflux::basis::Degree;
use conservaflux::parallel::Execution;
use conservaflux::pipeline::{Discretization, RunOptions};
use conservaflux::problems::load_example;
use conservaflux::verification::h1_seminorm_error;

fn main() -> conservaflux::Result<()> {
    let ex = load_example(2)?;
    for k in Degree::ALL {
        for n in [4, 8, 16] {
            let disc = Discretization::structured(n, k)?;
            let u_h = disc.solve(&ex.problem, &RunOptions::default())?;
            let err = h1_seminorm_error(&u_h, |p| ex.exact_gradient(p), None, Execution::Parallel)?;
            println!("k={k} n={n:<2} dofs={:<5} |u − u_h|_H¹ = {err:.3e}", disc.dofs.len());
        }
    }
    Ok(())
}
