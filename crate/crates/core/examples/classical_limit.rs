//! The spin-J speed limit at the most distant rotation angle shrinks as J
//! grows.
//!
//! ```bash
//! cargo run --example classical_limit
//! ```

use unitary_qsl::bounds::classical_limit_table;

fn main() -> unitary_qsl::Result<()> {
    let js = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
    println!("{:>6} {:>10} {:>10}", "J", "phi_perp", "tau2");
    for row in classical_limit_table(&js, 1.0)? {
        println!("{:6.1} {:10.5} {:10.5}", row.j, row.phi_perp, row.tau2);
    }
    Ok(())
}
