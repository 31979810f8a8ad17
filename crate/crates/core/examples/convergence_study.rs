//! Tabulates H¹ errors on a mesh ladder and prints the observed rates.

use conservaflux::basis::Degree;
use conservaflux::pipeline::RunOptions;
use conservaflux::problems::load_example;
use conservaflux::verification::convergence_study;

fn main() -> conservaflux::Result<()> {
    let ex = load_example(1)?;
    for k in Degree::ALL {
        let table = convergence_study(&ex.problem, k, &ex.default_levels(k), &RunOptions::default())?;
        println!("k={k}");
        for r in &table.rows {
            println!("  n={:<3} |u−u_h|={:.3e} |u−ũ_h|={:.3e} |u_h−ũ_h|={:.3e}", r.n, r.err_uh, r.err_tilde, r.err_diff);
        }
        println!("  rates: {} {} {}", table.rate_uh(), table.rate_tilde(), table.rate_diff());
    }
    Ok(())
}
