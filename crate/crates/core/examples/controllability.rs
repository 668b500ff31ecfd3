//! Dynamical Lie algebra of the su(3) phase drive: depths, provenance and a
//! few structure constants.
//!
//! ```bash
//! cargo run --example controllability
//! ```

use unitary_qsl::lie::{generate_algebra, gell_mann_coefficients, DEFAULT_TOL};
use unitary_qsl::models::PhaseControlModel;

fn main() -> unitary_qsl::Result<()> {
    let m = PhaseControlModel::su3(1.0)?;
    let (a, b) = m.generators();
    let report = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
    println!("dimension {} (fully controllable: {})", report.dimension, report.fully_controllable);
    for (k, e) in report.basis.iter().enumerate() {
        let c = gell_mann_coefficients(&e.element);
        let coeffs: Vec<String> = c.iter().map(|x| format!("{x:+.3}")).collect();
        println!("chi_{k} depth {} {:<16} [{}]", e.depth, e.provenance.expr(), coeffs.join(" "));
    }
    println!("f_012 = {:.6}", report.structure_constant(0, 1, 2));
    Ok(())
}
