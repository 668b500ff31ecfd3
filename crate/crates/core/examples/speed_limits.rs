//! QSL times along the su(3) target families, and the su(2) closed form.
//!
//! ```bash
//! cargo run --example speed_limits
//! ```

use std::f64::consts::PI;

use unitary_qsl::bounds::{model_qsl, qsl_curve};
use unitary_qsl::models::{PhaseControlModel, TargetFamily, TargetSpec};

fn main() -> unitary_qsl::Result<()> {
    let su2 = PhaseControlModel::su2(1.0)?;
    for phi in [0.5, PI / 2.0, PI] {
        let q = model_qsl(&su2, &su2.target(&TargetSpec::named("z", phi))?)?;
        println!("su2 V_z({phi:.4}): tau = {:.6}", q.tau_unified);
    }

    let su3 = PhaseControlModel::su3(1.0)?;
    let phis: Vec<f64> = (1..=8).map(|k| k as f64 * PI / 8.0).collect();
    println!("\n{:>8} {:>10} {:>10} {:>10} {:>10}", "phi", "tau1(A)", "tau2(A)", "tau1(C)", "tau2(C)");
    let a = qsl_curve(&su3, &TargetFamily::named("A"), &phis)?;
    let c = qsl_curve(&su3, &TargetFamily::named("C"), &phis)?;
    for (ra, rc) in a.iter().zip(&c) {
        println!(
            "{:8.4} {:10.5} {:10.5} {:10.5} {:10.5}",
            ra.phi, ra.report.tau1, ra.report.tau2, rc.report.tau1, rc.report.tau2
        );
    }
    Ok(())
}
