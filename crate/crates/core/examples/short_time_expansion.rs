//! Generator of a polynomial phase drive to fifth order, checked against
//! direct propagation, and the resulting short-time bounds.
//!
//! ```bash
//! cargo run --example short_time_expansion
//! ```

use unitary_qsl::lie::{generate_algebra, DEFAULT_TOL};
use unitary_qsl::models::PhaseControlModel;
use unitary_qsl::short_time::{
    generator_expansion, order_accuracy_check, su3_mct_bounds, SlopeEstimate, TaylorDrive, MAX_ORDER,
};

fn main() -> unitary_qsl::Result<()> {
    let m = PhaseControlModel::su3(1.0)?;
    let drive = TaylorDrive::for_model(&m, vec![0.3, -0.8, 0.5, 0.2], MAX_ORDER)?;

    let (a, b) = m.generators();
    let report = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
    let basis = report.elements();
    let table = generator_expansion(&drive, MAX_ORDER)?.component_table(&basis)?;
    println!("components a_n^mu (rows n = 1..5, columns by algebra element)");
    for (n, row) in table.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:+.2e}")).collect();
        println!("A{} {}", n + 1, cells.join(" "));
    }

    let grid: Vec<f64> = (0..10).map(|k| 0.01 * 20f64.powf(k as f64 / 9.0)).collect();
    for n in 1..=MAX_ORDER {
        let chk = order_accuracy_check(&drive, n, &grid)?;
        match chk.slope {
            SlopeEstimate::Fitted(k) => println!("N = {n}: residual slope {k:.3}"),
            SlopeEstimate::Exact => println!("N = {n}: exact"),
        }
    }

    for phi in [0.05, 0.1, 0.2, 0.4] {
        let (ta, tc, td) = su3_mct_bounds(&m, phi, &report)?;
        println!("phi {phi:.2}: T_A {ta:.4}  T_C {tc:.4}  T_D {td:.4}");
    }
    Ok(())
}
